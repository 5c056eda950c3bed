//! Auto-Backlund transformations `u -> u + (ln R)''`, `R -> b / R`, the
//! closed-form transformed densities, cusp-exponent fits and shift alignment.

use std::sync::Arc;

use num_complex::Complex;

use crate::density::{Branch, Density, Family, RationalProfile, Shape, SingularKind, Smoothness, XForm};
use crate::elliptic::{others, HalfPeriod, LatticeParams};
use crate::error::{Error, Result};
use crate::hierarchy::{gap_functions, PotentialSpec};
use crate::numeric::{fit_line, golden_section, median, solve_linear};
use crate::onegap::amplitude;
use crate::real::{lit, to_f64, Real};
use crate::tol::Tolerances;
use crate::twogap::Sign;
use crate::yfunc::{SharedFn, YFunction};

/// `u + (ln R)''`.
pub fn backlund_potential<T: Real>(u: PotentialSpec<T>, r: SharedFn<T>) -> PotentialSpec<T> {
    let label = format!("backlund({})", u.label);
    let period = u.period_y;
    let edges = u.predicted_edges.clone();
    PotentialSpec::from_fn(
        move |y| {
            let rj = r.jet(y)?;
            if !(rj.value() > T::zero()) {
                return Err(Error::NonPositiveDensity {
                    y: to_f64(y),
                    value: to_f64(rj.value()),
                });
            }
            let l2 = rj.ln().differentiate().differentiate();
            Ok(u.jet(y)? + l2)
        },
        period,
        edges,
        label,
    )
}

/// A density, its transform, and both potentials.
#[derive(Debug, Clone)]
pub struct BacklundPair<T: Real> {
    pub source: Density<T>,
    pub target: Density<T>,
    /// Median of `R_target * R_source`.
    pub b: T,
    /// Relative spread (stddev / mean) of that product.
    pub product_variation: T,
    /// Constants `alpha_m` of the reconstruction from the transformed potential.
    pub alpha: Vec<T>,
    pub u_source: PotentialSpec<T>,
    pub u_target: PotentialSpec<T>,
}

/// Transforms a smooth density by rebuilding `R^` from `u^` through the
/// general reconstruction `R^ = 1 / (1 + sum alpha_m f_m(u^))` (all
/// `beta_m = 0`), and measuring `b` from `R^ R`.
pub fn backlund_density<T: Real>(d: &Density<T>, tol: &Tolerances) -> Result<BacklundPair<T>> {
    if d.smoothness != Smoothness::Smooth {
        return Err(Error::InvalidOperator(format!(
            "{} branch {} is not smooth; use the closed-form partner",
            d.family.name(),
            d.branch
        )));
    }
    let src: SharedFn<T> = Arc::new(d.clone());
    let u = d.liouville();
    let u_hat = backlund_potential(u.clone(), src.clone());
    let gaps_n = d.band_edges.len().saturating_sub(1) / 2;
    let gaps = gap_functions(u_hat.clone(), [T::zero(); 3]);
    // unknowns: t = 1/b and alpha_1..alpha_n in  t R - sum alpha_m f_m = 1
    let n = gaps_n + 1;
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in 0..n {
        let y = d.period_y * lit(0.5 * (k as f64 + 0.382) / n as f64);
        let mut row = vec![d.r(y)?];
        for m in 1..=gaps_n {
            row.push(-gaps.f(m, y)?);
        }
        rows.push(row);
        rhs.push(T::one());
    }
    let sol = solve_linear(rows, rhs, lit(1e-10))?;
    let alpha = sol[1..].to_vec();
    let recon = crate::hierarchy::reconstruct_r(gaps, alpha.clone());
    let mut products = Vec::with_capacity(200);
    for k in 0..200 {
        let y = d.period_y * lit((k as f64 + 0.5) / 200.0);
        products.push(recon.value(y)? * d.r(y)?);
    }
    let b = median(&products);
    let variation = relative_spread(&products);
    if !(variation < lit(tol.product)) {
        return Err(Error::NotConstantProduct {
            variation: to_f64(variation),
        });
    }
    let family = match d.family {
        Family::TwogapPm | Family::BacklundTwogapPm => Family::BacklundTwogapPm,
        Family::TwogapAlpha | Family::BacklundTwogapAlpha => Family::BacklundTwogapAlpha,
        _ => Family::BacklundOnegap,
    };
    let target = Density::new(
        family,
        d.branch,
        Shape::Reciprocal {
            b,
            source: Box::new(d.clone()),
        },
        d.lattice.clone(),
        d.band_edges.clone(),
    )?;
    Ok(BacklundPair {
        source: d.clone(),
        target,
        b,
        product_variation: variation,
        alpha,
        u_source: u,
        u_target: u_hat,
    })
}

/// `stddev / |mean|`.
pub fn relative_spread<T: Real>(v: &[T]) -> T {
    let n: T = lit(v.len() as f64);
    let mean = v.iter().fold(T::zero(), |s, &x| s + x) / n;
    let var = v.iter().fold(T::zero(), |s, &x| s + (x - mean).powi(2)) / n;
    var.sqrt() / mean.abs()
}

/// `(R_source * R_target)` on a grid away from zeros and poles: returns
/// (median, relative spread).
pub fn product_stats<T: Real>(a: &Density<T>, b: &Density<T>, n: usize) -> Result<(T, T)> {
    let mut p = Vec::with_capacity(n);
    for k in 0..n {
        let y = a.period_y * lit((k as f64 + 0.5) / n as f64);
        if a.pole_distance(y) < a.period_y * lit(0.01) || b.pole_distance(y) < a.period_y * lit(0.01) {
            continue;
        }
        p.push(a.r(y)? * b.r(y)?);
    }
    Ok((median(&p), relative_spread(&p)))
}

/// `b_alpha = (3/2 e_alpha)^2 / H_alpha^2`.
pub fn onegap_b<T: Real>(l: &LatticeParams<T>, alpha: u8) -> T {
    let e = lit::<T>(1.5) * l.root(alpha);
    e * e / l.h2(alpha)
}

/// Transform of the one-gap density `r_alpha`: `A_alpha (e_alpha - wp(iy + omega))`.
pub fn build_backlund_onegap<T: Real>(alpha: u8, l: &LatticeParams<T>) -> Result<Density<T>> {
    if !(1..=3).contains(&alpha) {
        return Err(Error::InvalidBranch(format!("alpha = {alpha}")));
    }
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
        Family::BacklundOnegap,
        Branch::Alpha(alpha),
        shape,
        Some(l.clone()),
        crate::onegap::onegap_edges(l, alpha),
    )
}

/// Transformed one-gap potential `-2 wp(iy + omega + omega_alpha) - e_alpha`.
pub fn onegap_backlund_potential<T: Real>(l: &LatticeParams<T>, alpha: u8) -> Result<PotentialSpec<T>> {
    Ok(crate::onegap::onegap_potential(l, alpha, HalfPeriod::from_index(alpha)?))
}

/// Two-gap branch selector for the transformed densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoGapBranch {
    Pm(Sign),
    Alpha(u8),
}

/// `K` for the transformed two-gap densities.
pub fn twogap_k<T: Real>(branch: TwoGapBranch, l: &LatticeParams<T>) -> Result<T> {
    let g2 = l.g2;
    match branch {
        TwoGapBranch::Pm(sign) => {
            if !(g2 > T::zero()) {
                return Err(Error::NegativeG2(to_f64(g2)));
            }
            let a = sign.value::<T>() * (g2 / lit(3.0)).sqrt();
            let d = a * a * a - l.g3;
            let den = lit::<T>(12.0) * a * d * a * a;
            if den.abs() <= T::epsilon() * lit(1e3) {
                return Err(Error::DegenerateBranch(format!("a^3 = g3 for a = {a}")));
            }
            Ok((lit::<T>(75.0) * a * a - lit::<T>(7.0) * g2) / den)
        }
        TwoGapBranch::Alpha(alpha) => {
            if !(1..=3).contains(&alpha) {
                return Err(Error::InvalidBranch(format!("alpha = {alpha}")));
            }
            let a = l.root(alpha);
            let n = lit::<T>(15.0 / 8.0) * a - lit::<T>(7.0 / 24.0) * g2;
            let den = lit::<T>(2.0)
                * (lit::<T>(3.0) * a * a - g2)
                * (lit::<T>(12.0) * a * a - g2)
                * n;
            if den.abs() <= T::epsilon() * lit(1e3) * g2.abs().powi(3).max(T::one()) {
                return Err(Error::DegenerateBranch(format!("K denominator vanishes for alpha = {alpha}")));
            }
            Ok((lit::<T>(75.0) * a * a - lit::<T>(7.0) * g2) / den)
        }
    }
}

/// Transformed two-gap density in closed form.
///
/// The `zeta` coefficient is `+i a K` for every branch, which is what makes
/// `x' = R^` hold. [`build_backlund_twogap_flipped`] keeps the alternative
/// sign for comparison.
pub fn build_backlund_twogap<T: Real>(branch: TwoGapBranch, l: &LatticeParams<T>) -> Result<Density<T>> {
    build_twogap_hat(branch, l, false)
}

/// Variant with `-+ i a K` (`-i e_alpha K` for the alpha branches) in the
/// `zeta` term.
pub fn build_backlund_twogap_flipped<T: Real>(branch: TwoGapBranch, l: &LatticeParams<T>) -> Result<Density<T>> {
    build_twogap_hat(branch, l, true)
}

fn build_twogap_hat<T: Real>(branch: TwoGapBranch, l: &LatticeParams<T>, flipped: bool) -> Result<Density<T>> {
    let k = twogap_k(branch, l)?;
    let six: T = lit(6.0);
    let (a, factors, slope, out_branch, edges_a) = match branch {
        TwoGapBranch::Pm(sign) => {
            let a = sign.value::<T>() * (l.g2 / lit(3.0)).sqrt();
            (a, vec![(-a / lit(2.0), 2)], k * l.g2 / six, sign.branch(), a)
        }
        TwoGapBranch::Alpha(alpha) => {
            let (_, b, c) = others(alpha);
            let (eb, ec) = (l.root(b), l.root(c));
            let a = l.root(alpha);
            (
                a,
                vec![(eb, 1), (ec, 1)],
                k * (l.g2 / lit(12.0) + eb * ec),
                Branch::Alpha(alpha),
                a,
            )
        }
    };
    let mut zc = Complex::new(T::zero(), a * k);
    if flipped {
        match branch {
            TwoGapBranch::Pm(sign) => zc = zc * (-sign.value::<T>()),
            TwoGapBranch::Alpha(_) => zc = -zc,
        }
    }
    let family = match branch {
        TwoGapBranch::Pm(_) => Family::BacklundTwogapPm,
        TwoGapBranch::Alpha(_) => Family::BacklundTwogapAlpha,
    };
    let edges = crate::twogap::TwoGapSpec::new(edges_a, l)?.edges.to_vec();
    let shape = Shape::Elliptic {
        profile: RationalProfile {
            scale: k,
            factors,
            line: HalfPeriod::Zero,
        },
        x_map: XForm {
            slope,
            zeta_terms: vec![(zc, Complex::new(T::zero(), T::zero()))],
            wp_prime_terms: vec![Complex::new(T::zero(), -k / six)],
            offset: -zc * l.eta,
        },
    };
    Density::new(family, out_branch, shape, Some(l.clone()), edges)
}

/// Least-squares fit of `log|r|` against `log|x - x0|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspFit<T> {
    pub exponent: T,
    pub residual: T,
    /// Preimage of `x0`.
    pub y0: T,
}

/// Measures `p` in `r(x) ~ C |x - x0|^p` over distances `[1e-6 T, 1e-3 T]`,
/// `T` the period in `x` (1 for non-periodic densities).
pub fn cusp_exponent<T: Real>(d: &Density<T>, x0: T, tol: &Tolerances) -> Result<CuspFit<T>> {
    let y_inv = d.invert_x(x0, tol)?;
    let scale = if d.period_x.is_finite() { d.period_x.abs() } else { T::one() };
    let span = if d.is_periodic() { d.period_y } else { T::one() };
    // x ~ y^(k+1) near a zero of order k, so the inverted y is only good to
    // about the (k+1)-th root of the x tolerance; snap to the analytic zero.
    let y0 = d
        .singularities
        .iter()
        .filter(|s| s.kind == SingularKind::Zero)
        .map(|s| {
            let mut dist = (y_inv - s.y).abs();
            if d.is_periodic() {
                dist = dist % span;
                dist = dist.min(span - dist);
            }
            (dist, s.y)
        })
        .filter(|&(dist, _)| dist <= span * lit(1e-3))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(_, y)| y)
        .ok_or(Error::NotACusp { x0: to_f64(x0) })?;
    let lo = scale * lit(1e-6);
    let hi = scale * lit(1e-3);
    let n = 40;
    let mut lx = Vec::with_capacity(n);
    let mut lr = Vec::with_capacity(n);
    let sgn = if d.period_x < T::zero() { -T::one() } else { T::one() };
    for j in 0..n {
        let t = lit::<T>(j as f64 / (n - 1) as f64);
        let dist = (lo.ln() + (hi.ln() - lo.ln()) * t).exp();
        let y = d.invert_x(x0 + sgn * dist, tol)?;
        let xd = (d.x(y)? - x0).abs();
        let r = d.r(y)?.abs();
        lx.push(xd.ln());
        lr.push(r.ln());
    }
    let (slope, _, rms) = fit_line(&lx, &lr);
    if !(rms <= lit(tol.cusp_fit)) {
        return Err(Error::PoorFit {
            residual: to_f64(rms),
            tol: tol.cusp_fit,
        });
    }
    Ok(CuspFit {
        exponent: slope,
        residual: rms,
        y0,
    })
}

/// `x` positions of the zeros of `R` inside one period.
pub fn cusp_points<T: Real>(d: &Density<T>) -> Result<Vec<T>> {
    d.singularities
        .iter()
        .filter(|s| s.kind == SingularKind::Zero)
        .map(|s| d.x(s.y))
        .collect()
}

/// Finds `s` in `[0, period)` minimising `sup_t |f(t) - g(t + s)|` over `n`
/// sample points of one period: coarse grid, then golden-section refinement.
/// Returns `(s, sup residual)`.
pub fn align_shift<T: Real, F, G>(f: F, g: G, period: T, n: usize) -> Result<(T, T)>
where
    F: Fn(T) -> Result<T>,
    G: Fn(T) -> Result<T>,
{
    let ts: Vec<T> = (0..n).map(|k| period * lit((k as f64 + 0.31) / n as f64)).collect();
    let fv = ts.iter().map(|&t| f(t)).collect::<Result<Vec<T>>>()?;
    let sup = |s: T| -> Result<T> {
        let mut worst = T::zero();
        for (&t, &v) in ts.iter().zip(&fv) {
            worst = worst.max((v - g(t + s)?).abs());
        }
        Ok(worst)
    };
    let grid = 64;
    let step = period / lit(grid as f64);
    let mut best = (T::zero(), T::infinity());
    for k in 0..grid {
        let s = step * lit(k as f64);
        let v = sup(s)?;
        if v < best.1 {
            best = (s, v);
        }
    }
    let (s, v) = golden_section(&sup, best.0 - step, best.0 + step, period * lit(1e-13))?;
    let s = s - (s / period).floor() * period;
    Ok(if v < best.1 { (s, v) } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onegap::build_onegap;
    use crate::twogap::build_twogap_pm;

    fn fixture() -> LatticeParams<f64> {
        LatticeParams::from_roots(1.0, 0.0, -1.0).unwrap()
    }

    #[test]
    fn onegap_pipeline_b() {
        let l = fixture();
        let tol = Tolerances::default();
        let pair = backlund_density(&build_onegap(3, &l).unwrap(), &tol).unwrap();
        assert!((pair.b - 1.125).abs() < 1e-9, "b = {}", pair.b);
        assert!(pair.product_variation < 1e-10);
        let closed = build_backlund_onegap(3, &l).unwrap();
        for k in 0..10 {
            let y = 0.27 * k as f64;
            assert!((pair.target.r(y).unwrap() - closed.r(y).unwrap()).abs() < 1e-10);
        }
        assert!((pair.target.period_x - closed.period_x).abs() < 1e-10);
    }

    #[test]
    fn twogap_plus_pipeline_b() {
        let l = fixture();
        let pair = backlund_density(&build_twogap_pm(Sign::Plus, &l).unwrap(), &Tolerances::default()).unwrap();
        assert!((pair.b - 2.0).abs() < 1e-8, "b = {}", pair.b);
    }

    #[test]
    fn twogap_hat_x_derivative() {
        let l = fixture();
        let plus = build_backlund_twogap(TwoGapBranch::Pm(Sign::Plus), &l).unwrap();
        assert_eq!(plus.smoothness, Smoothness::Smooth);
        assert!(plus.x_derivative_residual(100, 0.0).unwrap() < 1e-9);
        let flipped = build_backlund_twogap_flipped(TwoGapBranch::Pm(Sign::Plus), &l).unwrap();
        assert!(flipped.x_derivative_residual(100, 0.0).unwrap() > 1e-3);
        for alpha in 1..=3 {
            let d = build_backlund_twogap(TwoGapBranch::Alpha(alpha), &l).unwrap();
            assert!(d.x_derivative_residual(100, 0.0).unwrap() < 1e-9, "alpha {alpha}");
        }
    }

    #[test]
    fn cusp_exponent_of_soliton() {
        let d = crate::onegap::soliton_limit(1.0f64 / 3.0).unwrap();
        let fit = cusp_exponent(&d, 0.0, &Tolerances::default()).unwrap();
        assert!((fit.exponent - 2.0 / 3.0).abs() < 0.02, "{}", fit.exponent);
    }

    #[test]
    fn shift_alignment() {
        let (s, v) = align_shift(|t: f64| Ok(t.sin()), |t: f64| Ok((t - 1.0).sin()), std::f64::consts::TAU, 100).unwrap();
        assert!((s - 1.0).abs() < 1e-8 && v < 1e-8, "{s} {v}");
    }
}
