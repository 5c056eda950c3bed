//! One-gap densities: the smooth Krein density, the singular branches, the
//! cusp-periodic densities, and the soliton degeneration.

use num_complex::Complex;

use crate::density::{Branch, Density, Family, Shape};
use crate::density::{RationalProfile, XForm};
use crate::elliptic::{HalfPeriod, LatticeParams};
use crate::error::{Error, Result};
use crate::hierarchy::PotentialSpec;
use crate::real::{lit, Real};

/// Roots of `4c^3 - g2 c + g3 = 0`, which are `-e_alpha`.
pub fn onegap_consistency_roots<T: Real>(l: &LatticeParams<T>) -> Vec<T> {
    vec![-l.e1, -l.e2, -l.e3]
}

pub fn onegap_consistency_residual<T: Real>(l: &LatticeParams<T>, c: T) -> T {
    lit::<T>(4.0) * c * c * c - l.g2 * c + l.g3
}

fn check_alpha(alpha: u8, allowed: &[u8]) -> Result<()> {
    if allowed.contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidBranch(format!("alpha = {alpha}")))
    }
}

/// `A_alpha = (3/2) e_alpha / H_alpha^2`.
pub fn amplitude<T: Real>(l: &LatticeParams<T>, alpha: u8) -> Result<T> {
    let e = l.root(alpha);
    let scale = l.e1.abs().max(l.e3.abs());
    if e.abs() <= lit::<T>(1e-14) * scale {
        return Err(Error::ZeroEalpha { alpha });
    }
    Ok(lit::<T>(1.5) * e / l.h2(alpha))
}

/// Predicted edges `{e_j - e_alpha}` in increasing order.
pub fn onegap_edges<T: Real>(l: &LatticeParams<T>, alpha: u8) -> Vec<T> {
    let e = l.root(alpha);
    vec![l.e3 - e, l.e2 - e, l.e1 - e]
}

/// `x(y + 2|omega'|) - x(y) = 2 A (e_alpha |omega'| + Im eta')`, shared by the
/// one-gap and cusp densities.
pub fn onegap_period_closed<T: Real>(l: &LatticeParams<T>, alpha: u8) -> Result<T> {
    let a = amplitude(l, alpha)?;
    Ok(lit::<T>(2.0) * a * (l.root(alpha) * l.omega_p + l.eta_p))
}

/// `R = A (e_alpha - wp(iy + omega + omega_alpha))`.
pub fn build_onegap<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<Density<T>> {
    check_alpha(alpha, &[1, 2, 3])?;
    let a = amplitude(l, alpha)?;
    build_parts(alpha, l, a, a)
}

/// As [`build_onegap`] with the amplitude of `R` replaced by `a` while `x`
/// keeps the true amplitude. Used for mutation tests: `x' = R` breaks
/// unless `a` is right.
pub fn build_with_amplitude<T: Real>(alpha: u8, l: &LatticeParams<T>, a: T) -> Result<Density<T>> {
    check_alpha(alpha, &[1, 2, 3])?;
    build_parts(alpha, l, a, amplitude(l, alpha)?)
}

fn build_parts<T: Real>(alpha: u8, l: &LatticeParams<T>, a_r: T, a: T) -> Result<Density<T>> {
    let line = HalfPeriod::from_index(alpha)?;
    let i = Complex::new(T::zero(), a);
    let e = l.root(alpha);
    let shape = Shape::Elliptic {
        profile: RationalProfile {
            scale: -a_r,
            factors: vec![(e, 1)],
            line,
        },
        x_map: XForm {
            slope: e * a,
            zeta_terms: vec![(-i, Complex::new(T::zero(), T::zero()))],
            wp_prime_terms: vec![],
            offset: i * (Complex::new(l.eta, T::zero()) + l.eta_of(line)),
        },
    };
    Density::new(
        Family::Onegap,
        Branch::Alpha(alpha),
        shape,
        Some(l.clone()),
        onegap_edges(l, alpha),
    )
}

/// Cusp-periodic density `R = A (e_alpha - wp(iy + omega))`, `alpha` in {1, 2}.
pub fn build_cusp<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<Density<T>> {
    check_alpha(alpha, &[1, 2])?;
    let a = amplitude(l, alpha)?;
    let i = Complex::new(T::zero(), a);
    let e = l.root(alpha);
    let shape = Shape::Elliptic {
        profile: RationalProfile {
            scale: -a,
            factors: vec![(e, 1)],
            line: HalfPeriod::Zero,
        },
        x_map: XForm {
            slope: e * a,
            zeta_terms: vec![(-i, Complex::new(T::zero(), T::zero()))],
            wp_prime_terms: vec![],
            offset: i * l.eta,
        },
    };
    Density::new(
        Family::OnegapCusp,
        Branch::Alpha(alpha),
        shape,
        Some(l.clone()),
        onegap_edges(l, alpha),
    )
}

/// One-gap Lame potential `-2 wp(iy + omega + omega_shift) - e_alpha`.
pub fn onegap_potential<T: Real>(l: &LatticeParams<T>, alpha: u8, shift: HalfPeriod) -> PotentialSpec<T> {
    PotentialSpec::lame(
        l,
        lit(2.0),
        shift,
        -l.root(alpha),
        onegap_edges(l, alpha),
        format!("lame1(alpha={alpha}, shift={})", shift.index()),
    )
}

/// `R = tanh^2(sqrt(3 gamma) y)`, the limit of the cusp density as the
/// lower band collapses.
pub fn soliton_limit<T: Real>(gamma: T) -> Result<Density<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidBranch(format!("gamma = {gamma} must be positive")));
    }
    let k = (lit::<T>(3.0) * gamma).sqrt();
    let e = lit::<T>(-3.0) * gamma;
    Density::new(
        Family::Soliton,
        Branch::None,
        Shape::Soliton { k },
        None,
        vec![e, e, T::zero()],
    )
}

/// Lattice `e = (2 gamma, -gamma + delta/2, -gamma - delta/2)` whose cusp
/// density tends to the soliton as `delta -> 0`.
pub fn soliton_lattice<T: Real>(gamma: T, delta: T) -> Result<LatticeParams<T>> {
    let half = delta / lit(2.0);
    LatticeParams::from_roots(lit::<T>(2.0) * gamma, -gamma + half, -gamma - half)
}

/// `sup |R_cusp - R_soliton|` over `[y_lo, y_hi]` on `n` points.
pub fn soliton_distance<T: Real>(gamma: T, delta: T, y_lo: T, y_hi: T, n: usize) -> Result<T> {
    let l = soliton_lattice(gamma, delta)?;
    let cusp = build_cusp(1, &l)?;
    let sol = soliton_limit(gamma)?;
    let mut worst = T::zero();
    for k in 0..n {
        let y = y_lo + (y_hi - y_lo) * lit(k as f64 / (n - 1).max(1) as f64);
        worst = worst.max((cusp.r(y)? - sol.r(y)?).abs());
    }
    Ok(worst)
}
