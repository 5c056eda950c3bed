//! Two-gap densities built on the Lame potential `-6 wp(iy + omega) + 3a`.

use num_complex::Complex;

use crate::density::{Branch, Density, Family, RationalProfile, Shape, XForm};
use crate::elliptic::{others, HalfPeriod, LatticeParams};
use crate::error::{Error, Result};
use crate::hierarchy::PotentialSpec;
use crate::real::{lit, to_f64, Real};

/// Sign of the `a = +-sqrt(g2/3)` branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Self::Plus => T::one(),
            Self::Minus => -T::one(),
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Self::Plus => Branch::Plus,
            Self::Minus => Branch::Minus,
        }
    }
}

/// The five admissible `a`: `+sqrt(g2/3), -sqrt(g2/3), e1, e2, e3`.
pub fn twogap_admissible_roots<T: Real>(l: &LatticeParams<T>) -> Result<Vec<T>> {
    let s = sqrt_g2_3(l)?;
    Ok(vec![s, -s, l.e1, l.e2, l.e3])
}

/// `(a^2 - g2/3)(4a^3 - g2 a - g3)`.
pub fn twogap_admissible_residual<T: Real>(l: &LatticeParams<T>, a: T) -> T {
    (a * a - l.g2 / lit(3.0)) * (lit::<T>(4.0) * a * a * a - l.g2 * a - l.g3)
}

fn sqrt_g2_3<T: Real>(l: &LatticeParams<T>) -> Result<T> {
    if !(l.g2 > T::zero()) {
        return Err(Error::NegativeG2(to_f64(l.g2)));
    }
    Ok((l.g2 / lit(3.0)).sqrt())
}

/// Spectral data attached to one admissible `a`.
#[derive(Debug, Clone)]
pub struct TwoGapSpec<T: Real> {
    pub a: T,
    pub lattice: LatticeParams<T>,
    pub mu1: T,
    pub mu2: T,
    /// `E0..E4`, increasing.
    pub edges: [T; 5],
    /// Numerator of the density for this branch.
    pub numerator: T,
    /// `b` in `wp^2 + a wp + b`; always `a^2 - g2/4`.
    pub b_den: T,
    /// Solution of `wp(gamma) = -a/2`, only for the `+-` branches.
    pub gamma: Option<Complex<T>>,
    /// The constant `(15/18) a^2 - (7/24) g2` of the general two-gap form.
    /// It does not equal `numerator`; kept for comparison.
    pub k_general: T,
}

impl<T: Real> TwoGapSpec<T> {
    pub fn new(a: T, l: &LatticeParams<T>) -> Result<Self> {
        let three: T = lit(3.0);
        let root = (three * l.g2).sqrt();
        let mut edges = [
            -root + three * a,
            -three * l.e1 + three * a,
            -three * l.e2 + three * a,
            -three * l.e3 + three * a,
            root + three * a,
        ];
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        let s = sqrt_g2_3(l)?;
        let tol = lit::<T>(1e-12) * s.max(T::one());
        let is_pm = (a.abs() - s).abs() <= tol;
        let alpha = (1..=3u8).find(|&j| (l.root(j) - a).abs() <= tol);
        let (numerator, gamma) = if is_pm {
            (l.g2 / three, Some(l.solve_wp_real(-a / lit(2.0))?))
        } else if let Some(j) = alpha {
            (lit::<T>(15.0 / 8.0) * l.root(j) - lit::<T>(7.0 / 24.0) * l.g2, None)
        } else {
            return Err(Error::InvalidBranch(format!("a = {a} is not an admissible value")));
        };
        Ok(Self {
            a,
            lattice: l.clone(),
            mu1: -three * l.e2 + three * a,
            mu2: -three * l.e3 + three * a,
            edges,
            numerator,
            b_den: a * a - l.g2 / lit(4.0),
            gamma,
            k_general: lit::<T>(15.0 / 18.0) * a * a - lit::<T>(7.0 / 24.0) * l.g2,
        })
    }

    /// Largest `|wp^2 + a wp + b_den - (completed square)|` over a grid of
    /// `wp` values in `[e3, e1]`, relative to the scale of the roots.
    pub fn factorization_residual(&self) -> T {
        let l = &self.lattice;
        let s = (l.g2 / lit(3.0)).sqrt();
        let is_pm = (self.a.abs() - s).abs() <= lit::<T>(1e-12) * s.max(T::one());
        let mut worst = T::zero();
        for k in 0..=20 {
            let p = l.e3 + (l.e1 - l.e3) * lit(k as f64 / 20.0);
            let quad = p * p + self.a * p + self.b_den;
            let target = if is_pm {
                (p + self.a / lit(2.0)).powi(2)
            } else {
                let alpha = (1..=3u8)
                    .min_by(|&i, &j| {
                        (l.root(i) - self.a)
                            .abs()
                            .partial_cmp(&(l.root(j) - self.a).abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .unwrap_or(1);
                let (_, b, c) = others(alpha);
                (p - l.root(b)) * (p - l.root(c))
            };
            worst = worst.max((quad - target).abs());
        }
        worst / l.e1.abs().max(l.e3.abs()).powi(2)
    }
}

/// `u = -6 wp(iy + omega) + 3a` with the predicted edges of `a`.
pub fn lame_potential<T: Real>(a: T, l: &LatticeParams<T>) -> Result<PotentialSpec<T>> {
    let edges = TwoGapSpec::new(a, l)?.edges.to_vec();
    Ok(PotentialSpec::lame(
        l,
        lit(6.0),
        HalfPeriod::Zero,
        lit::<T>(3.0) * a,
        edges,
        format!("lame2(a={a})"),
    ))
}

/// `(2a^2 / (a^3 - g3)) (a |omega'| - 2 Im eta')`.
pub fn twogap_pm_period_closed<T: Real>(sign: Sign, l: &LatticeParams<T>) -> Result<T> {
    let a = sign.value::<T>() * sqrt_g2_3(l)?;
    let d = a * a * a - l.g3;
    Ok(lit::<T>(2.0) * a * a / d * (a * l.omega_p - lit::<T>(2.0) * l.eta_p))
}

/// `R = (g2/3) / (wp(iy + omega) + a/2)^2` with `a = +-sqrt(g2/3)`.
pub fn build_twogap_pm<T: Real>(sign: Sign, l: &LatticeParams<T>) -> Result<Density<T>> {
    let a = sign.value::<T>() * sqrt_g2_3(l)?;
    let d = a * a * a - l.g3;
    if d.abs() <= lit::<T>(1e-12) * a.abs().powi(3).max(T::one()) {
        return Err(Error::DegenerateBranch(format!("a^3 = g3 for a = {a}")));
    }
    let spec = TwoGapSpec::new(a, l)?;
    let gamma = spec.gamma.ok_or(Error::GammaNotFound {
        target: to_f64(-a / lit(2.0)),
    })?;
    let c = Complex::new(T::zero(), a * a / d);
    let shape = Shape::Elliptic {
        profile: RationalProfile {
            scale: spec.numerator,
            factors: vec![(-a / lit(2.0), -2)],
            line: HalfPeriod::Zero,
        },
        x_map: XForm {
            slope: a * a * a / d,
            zeta_terms: vec![(c, -gamma), (c, gamma)],
            wp_prime_terms: vec![],
            offset: -c * lit::<T>(2.0) * l.eta,
        },
    };
    Density::new(
        Family::TwogapPm,
        sign.branch(),
        shape,
        Some(l.clone()),
        spec.edges.to_vec(),
    )
}

/// Closed-form period of the `r_alpha` density.
pub fn twogap_alpha_period_closed<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<T> {
    let (_, b, c) = others(alpha);
    let (eb, ec) = (l.root(b), l.root(c));
    let (hb, hc) = (l.h2(b), l.h2(c));
    let a = alpha_amplitude(alpha, l)?;
    let two: T = lit(2.0);
    Ok(two * a * l.omega_p * (ec / hc - eb / hb) + two * a * l.eta_p * (T::one() / hc - T::one() / hb))
}

fn alpha_amplitude<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<T> {
    let (_, b, c) = others(alpha);
    let diff = l.root(b) - l.root(c);
    if diff.abs() <= T::epsilon() * lit(16.0) * l.e1.abs().max(l.e3.abs()) {
        return Err(Error::ZeroDenominatorConstant);
    }
    let n = lit::<T>(15.0 / 8.0) * l.root(alpha) - lit::<T>(7.0 / 24.0) * l.g2;
    Ok(n / diff)
}

/// `R = ((15/8) e_alpha - (7/24) g2) / ((wp - e_beta)(wp - e_gamma))`.
pub fn build_twogap_alpha<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<Density<T>> {
    if !(1..=3).contains(&alpha) {
        return Err(Error::InvalidBranch(format!("alpha = {alpha}")));
    }
    let (_, b, c) = others(alpha);
    let a = alpha_amplitude(alpha, l)?;
    let spec = TwoGapSpec::new(l.root(alpha), l)?;
    let (eb, ec) = (l.root(b), l.root(c));
    let (hb, hc) = (l.h2(b), l.h2(c));
    let hp = |j: u8| HalfPeriod::from_index(j);
    let i = Complex::new(T::zero(), a);
    let shape = Shape::Elliptic {
        profile: RationalProfile {
            scale: spec.numerator,
            factors: vec![(eb, -1), (ec, -1)],
            line: HalfPeriod::Zero,
        },
        x_map: XForm {
            slope: -a * (eb / hb - ec / hc),
            zeta_terms: vec![
                (-i / hc, l.half_period(hp(c)?)),
                (i / hb, l.half_period(hp(b)?)),
            ],
            wp_prime_terms: vec![],
            offset: i * (l.eta_of(hp(c)?) / hc - l.eta_of(hp(b)?) / hb),
        },
    };
    Density::new(
        Family::TwogapAlpha,
        Branch::Alpha(alpha),
        shape,
        Some(l.clone()),
        spec.edges.to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Smoothness;

    fn fixture() -> LatticeParams<f64> {
        LatticeParams::from_roots(1.0, 0.0, -1.0).unwrap()
    }

    #[test]
    fn plus_branch_values() {
        let l = fixture();
        let d = build_twogap_pm(Sign::Plus, &l).unwrap();
        assert_eq!(d.smoothness, Smoothness::Smooth);
        assert!((d.r(0.0).unwrap() - 0.535_898_384_862_245_4).abs() < 1e-12);
        assert!((d.period_x - 4.697_297_315_446_666_5).abs() < 1e-10);
        let closed = twogap_pm_period_closed(Sign::Plus, &l).unwrap();
        assert!((d.period_x - closed).abs() < 1e-10);
        assert!(d.x(0.0).unwrap().abs() < 1e-12, "x(0) = {}", d.x(0.0).unwrap());
        assert!(d.x_derivative_residual(100, 0.0).unwrap() < 1e-9);
    }

    #[test]
    fn minus_and_alpha_branches() {
        let g: LatticeParams<f64> = LatticeParams::from_roots(1.5, -0.2, -1.3).unwrap();
        let m = build_twogap_pm(Sign::Minus, &g).unwrap();
        assert_eq!(m.smoothness, Smoothness::Discontinuous);
        assert!(m.x_derivative_residual(100, 0.02).unwrap() < 1e-8);
        for alpha in 1..=3 {
            let d = build_twogap_alpha(alpha, &g).unwrap();
            assert!(d.x_derivative_residual(100, 0.02).unwrap() < 1e-8, "alpha {alpha}");
            let t = twogap_alpha_period_closed(alpha, &g).unwrap();
            assert!((d.period_x - t).abs() < 1e-9, "alpha {alpha}: {} vs {t}", d.period_x);
        }
    }

    #[test]
    fn edges_and_factorization() {
        let l = fixture();
        let s = 2.0 / 3f64.sqrt();
        let spec = TwoGapSpec::new(s, &l).unwrap();
        let want = [0.0, 2.0 * 3f64.sqrt() - 3.0, 2.0 * 3f64.sqrt(), 2.0 * 3f64.sqrt() + 3.0, 4.0 * 3f64.sqrt()];
        for (e, w) in spec.edges.iter().zip(want) {
            assert!((e - w).abs() < 1e-12);
        }
        for a in twogap_admissible_roots(&l).unwrap() {
            assert!(twogap_admissible_residual(&l, a).abs() < 1e-14);
            assert!(TwoGapSpec::new(a, &l).unwrap().factorization_residual() < 1e-14);
        }
    }
}
