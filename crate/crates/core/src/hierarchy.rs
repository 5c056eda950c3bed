//! Liouville relation, the gap functions `f1, f2, f3`, and the reconstruction
//! `R = 1 / (1 + <alpha, f>)`.

use std::fmt;
use std::sync::Arc;

use crate::elliptic::{HalfPeriod, LatticeParams};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numeric::{richardson_derivative, solve_linear};
use crate::real::{lit, to_f64, Real};
use crate::yfunc::{SharedFn, YFunction};

/// Where a potential's derivatives come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeSource {
    /// Exact Taylor jets (closed forms through the elliptic recursion).
    Analytic,
    /// Finite differences; only low orders are meaningful.
    FiniteDifference,
}

type JetFn<T> = Arc<dyn Fn(T) -> Result<Jet<T>> + Send + Sync>;

/// A periodic Schrodinger potential `u(y)`.
#[derive(Clone)]
pub struct PotentialSpec<T: Real> {
    eval: JetFn<T>,
    pub period_y: T,
    /// Predicted band edges, increasing. Empty when unknown.
    pub predicted_edges: Vec<T>,
    pub derivatives: DerivativeSource,
    pub label: String,
}

impl<T: Real> fmt::Debug for PotentialSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("label", &self.label)
            .field("period_y", &self.period_y)
            .field("predicted_edges", &self.predicted_edges)
            .field("derivatives", &self.derivatives)
            .finish()
    }
}

impl<T: Real> PotentialSpec<T> {
    pub fn from_fn<F>(f: F, period_y: T, predicted_edges: Vec<T>, label: impl Into<String>) -> Self
    where
        F: Fn(T) -> Result<Jet<T>> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            period_y,
            predicted_edges,
            derivatives: DerivativeSource::Analytic,
            label: label.into(),
        }
    }

    /// A potential known only by values. Derivatives up to order 2 come from
    /// Richardson-extrapolated central differences.
    pub fn sampled<F>(f: F, period_y: T, predicted_edges: Vec<T>, label: impl Into<String>) -> Self
    where
        F: Fn(T) -> Result<T> + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let h = period_y * lit(1e-3);
        let eval = move |y: T| -> Result<Jet<T>> {
            let g = f.clone();
            let v = g(y)?;
            let d1 = richardson_derivative(|t| g(t), y, h)?;
            let g2 = f.clone();
            let d2 = richardson_derivative(
                move |t| richardson_derivative(|s| g2(s), t, h),
                y,
                h,
            )?;
            Ok(Jet::from_derivatives(&[v, d1, d2]))
        };
        Self {
            eval: Arc::new(eval),
            period_y,
            predicted_edges,
            derivatives: DerivativeSource::FiniteDifference,
            label: label.into(),
        }
    }

    /// Lame-type potential `-c wp(i y + omega + omega_shift) + k`.
    pub fn lame(
        lattice: &LatticeParams<T>,
        coeff: T,
        shift: HalfPeriod,
        constant: T,
        predicted_edges: Vec<T>,
        label: impl Into<String>,
    ) -> Self {
        let l = lattice.clone();
        let period = lattice.omega_p * lit(2.0);
        Self::from_fn(
            move |y| Ok(l.wp_edge_jet(y, shift)?.scale(-coeff) + constant),
            period,
            predicted_edges,
            label,
        )
    }

    pub fn jet(&self, y: T) -> Result<Jet<T>> {
        (self.eval)(y)
    }

    pub fn value(&self, y: T) -> Result<T> {
        Ok(self.jet(y)?.value())
    }

    /// The same potential evaluated at `y + s`.
    pub fn shifted(&self, s: T) -> Self {
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |y| inner(y + s));
        out.predicted_edges = self.predicted_edges.clone();
        out
    }

    /// Largest `|u(y + period) - u(y)|` over `n` points of one period.
    pub fn periodicity_residual(&self, n: usize) -> Result<T> {
        let mut worst = T::zero();
        for k in 0..n {
            let y = self.period_y * lit((k as f64 + 0.37) / n as f64);
            let d = (self.value(y + self.period_y)? - self.value(y)?).abs();
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

impl<T: Real> YFunction<T> for PotentialSpec<T> {
    fn jet(&self, y: T) -> Result<Jet<T>> {
        (self.eval)(y)
    }
}

fn positive_jet<T: Real>(r: &dyn YFunction<T>, y: T) -> Result<Jet<T>> {
    let j = r.jet(y)?;
    if !(j.value() > T::zero()) {
        return Err(Error::NonPositiveDensity {
            y: to_f64(y),
            value: to_f64(j.value()),
        });
    }
    Ok(j)
}

/// `u = (R^{-1/2})'' R^{1/2}` at a single point.
pub fn liouville_jet<T: Real>(r: &dyn YFunction<T>, y: T) -> Result<Jet<T>> {
    let j = positive_jet(r, y)?;
    if j.order() < 2 {
        return Err(Error::MissingDerivative {
            needed: 2,
            available: j.order(),
        });
    }
    let inv = j.powf(lit(-0.5));
    Ok(inv.differentiate().differentiate() * j.sqrt())
}

/// Schrodinger potential of a positive density via the Liouville relation.
pub fn liouville_potential<T: Real>(
    r: SharedFn<T>,
    period_y: T,
    predicted_edges: Vec<T>,
) -> PotentialSpec<T> {
    PotentialSpec::from_fn(
        move |y| liouville_jet(r.as_ref(), y),
        period_y,
        predicted_edges,
        "liouville",
    )
}

/// The gap functions `f_m` built from a potential and constants `beta_m`.
#[derive(Clone, Debug)]
pub struct GapFunctions<T: Real> {
    pub u: PotentialSpec<T>,
    pub beta: [T; 3],
}

pub fn gap_functions<T: Real>(u: PotentialSpec<T>, beta: [T; 3]) -> GapFunctions<T> {
    GapFunctions { u, beta }
}

impl<T: Real> GapFunctions<T> {
    /// Jet of `f_m`, `m` in 1..=3.
    pub fn f_jet(&self, m: usize, y: T) -> Result<Jet<T>> {
        let u = self.u.jet(y)?;
        let needed = 2 * (m.clamp(1, 3) - 1);
        if u.order() < needed {
            return Err(Error::MissingDerivative {
                needed,
                available: u.order(),
            });
        }
        let c = |v: f64| -> T { lit(v) };
        let out = match m {
            1 => u.scale(c(-2.0)) + self.beta[0],
            2 => {
                let u2 = u.differentiate().differentiate();
                (u * u).scale(c(6.0)) - u2.scale(c(2.0)) + self.beta[1]
            }
            3 => {
                let u1 = u.differentiate();
                let u2 = u1.differentiate();
                let u4 = u2.differentiate().differentiate();
                let inner = u4 - (u * u2).scale(c(10.0)) - (u1 * u1).scale(c(5.0))
                    + (u * u * u).scale(c(10.0));
                inner.scale(c(-2.0)) + self.beta[2]
            }
            _ => {
                return Err(Error::InvalidBranch(format!("gap function index {m}")));
            }
        };
        Ok(out)
    }

    pub fn f(&self, m: usize, y: T) -> Result<T> {
        Ok(self.f_jet(m, y)?.value())
    }
}

/// `R = 1 / (1 + sum_m alpha_m f_m)`.
#[derive(Clone, Debug)]
pub struct Reconstructed<T: Real> {
    pub gaps: GapFunctions<T>,
    pub alpha: Vec<T>,
}

pub fn reconstruct_r<T: Real>(gaps: GapFunctions<T>, alpha: Vec<T>) -> Reconstructed<T> {
    Reconstructed { gaps, alpha }
}

impl<T: Real> Reconstructed<T> {
    fn denominator(&self, y: T) -> Result<Jet<T>> {
        let mut den = Jet::constant(T::one());
        let mut mag = T::one();
        for (m, &a) in self.alpha.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            let f = self.gaps.f_jet(m + 1, y)?.scale(a);
            mag = mag + f.value().abs();
            den = den + f;
        }
        if den.value().abs() <= T::epsilon() * lit(1e3) * mag {
            return Err(Error::DenominatorZero { y: to_f64(y) });
        }
        Ok(den)
    }
}

impl<T: Real> YFunction<T> for Reconstructed<T> {
    fn jet(&self, y: T) -> Result<Jet<T>> {
        Ok(self.denominator(y)?.recip())
    }
}

/// Result of [`fit_alpha`].
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaFit<T> {
    pub alpha: Vec<T>,
    /// Largest `|R_target - R_fit|` on the holdout grid.
    pub holdout_residual: T,
}

/// Solves `1/R(y_k) = 1 + sum_m alpha_m f_m(y_k)` at `n` points and checks the
/// result on a 50-point holdout grid.
pub fn fit_alpha<T: Real>(
    target: &dyn YFunction<T>,
    gaps: &GapFunctions<T>,
    n: usize,
    holdout_tol: T,
) -> Result<AlphaFit<T>> {
    let period = gaps.u.period_y;
    if n == 0 {
        return Ok(AlphaFit {
            alpha: vec![],
            holdout_residual: holdout(target, gaps, &[], period)?,
        })
        .and_then(|fit| check_fit(fit, holdout_tol));
    }
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for k in 0..n {
        // points in the open half period, off any symmetry centre
        let y = period * lit(0.5 * (k as f64 + 0.382) / n as f64);
        let r = positive_jet(target, y)?.value();
        let row = (1..=n).map(|m| gaps.f(m, y)).collect::<Result<Vec<T>>>()?;
        rows.push(row);
        rhs.push(T::one() / r - T::one());
    }
    let alpha = solve_linear(rows, rhs, lit(1e-10))?;
    let res = holdout(target, gaps, &alpha, period)?;
    check_fit(
        AlphaFit {
            alpha,
            holdout_residual: res,
        },
        holdout_tol,
    )
}

fn check_fit<T: Real>(fit: AlphaFit<T>, tol: T) -> Result<AlphaFit<T>> {
    if fit.holdout_residual.is_finite() && fit.holdout_residual < tol {
        Ok(fit)
    } else {
        Err(Error::NoLinearFit {
            residual: to_f64(fit.holdout_residual),
            tol: to_f64(tol),
        })
    }
}

fn holdout<T: Real>(
    target: &dyn YFunction<T>,
    gaps: &GapFunctions<T>,
    alpha: &[T],
    period: T,
) -> Result<T> {
    let recon = reconstruct_r(gaps.clone(), alpha.to_vec());
    let mut worst = T::zero();
    for k in 0..50 {
        let y = period * lit((k as f64 + 0.5) / 50.0);
        let d = (target.value(y)? - recon.value(y)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// One-gap constraint on the constants: `beta1 = 0`.
pub fn onegap_beta_residual<T: Real>(beta1: T) -> T {
    beta1.abs()
}

/// Two-gap constraint `(5/24) a beta1 + beta2 = 0`.
pub fn twogap_beta_residual<T: Real>(a: T, beta1: T, beta2: T) -> T {
    (lit::<T>(5.0 / 24.0) * a * beta1 + beta2).abs()
}

/// Condition on the constants accompanying the two-gap Backlund densities:
/// `30 a beta1 + beta2 = 180 a^2`.
pub fn backlund_beta_residual<T: Real>(a: T, beta1: T, beta2: T) -> T {
    (lit::<T>(30.0) * a * beta1 + beta2 - lit::<T>(180.0) * a * a).abs()
}

/// The pair `(beta1, beta2)` satisfying both two-gap conditions at once.
/// Exists whenever `a != 0`.
pub fn joint_beta<T: Real>(a: T) -> Option<(T, T)> {
    if a == T::zero() {
        return None;
    }
    // subtracting: (30 - 5/24) a beta1 = 180 a^2
    let beta1 = lit::<T>(180.0) * a / lit::<T>(30.0 - 5.0 / 24.0);
    let beta2 = -lit::<T>(5.0 / 24.0) * a * beta1;
    Some((beta1, beta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yfunc::FnJet;

    fn fixture() -> LatticeParams<f64> {
        LatticeParams::from_roots(1.0, 0.0, -1.0).unwrap()
    }

    fn r3(l: &LatticeParams<f64>) -> SharedFn<f64> {
        let l = l.clone();
        Arc::new(FnJet(move |y: f64| {
            let p = l.wp_edge_jet(y, HalfPeriod::Zero)?;
            Ok((p + 1.0).recip().scale(1.5))
        }))
    }

    #[test]
    fn constant_density_has_zero_potential() {
        let one: SharedFn<f64> = Arc::new(FnJet(|_y: f64| Ok(Jet::constant(1.0))));
        let u = liouville_potential(one, 1.0, vec![]);
        assert_eq!(u.value(0.3).unwrap(), 0.0);
    }

    #[test]
    fn liouville_of_r3_is_lame() {
        let l = fixture();
        let u = liouville_potential(r3(&l), 2.0 * l.omega_p, vec![]);
        for k in 0..20 {
            let y = 0.13 * k as f64;
            let lame = -2.0 * l.wp_edge(y, HalfPeriod::Zero).unwrap() + 1.0;
            assert!((u.value(y).unwrap() - lame).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn fit_recovers_one_sixth() {
        let l = fixture();
        let u = PotentialSpec::lame(&l, 2.0, HalfPeriod::Zero, 1.0, vec![0.0, 1.0, 2.0], "u3");
        let gaps = gap_functions(u, [0.0, 0.0, 0.0]);
        assert!((gaps.f(1, 0.0).unwrap() - 2.0).abs() < 1e-12);
        let fit = fit_alpha(r3(&l).as_ref(), &gaps, 1, 1e-8).unwrap();
        assert!((fit.alpha[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!(fit.holdout_residual < 1e-12);
    }

    #[test]
    fn wrong_family_is_rejected() {
        let l = fixture();
        let u = PotentialSpec::lame(&l, 2.0, HalfPeriod::Zero, 1.0, vec![], "u3");
        let gaps = gap_functions(u, [0.0, 0.0, 0.0]);
        let bump = FnJet(|y: f64| Ok(Jet::constant(1.0 + 0.1 * (3.0 * y).cos())));
        assert!(matches!(
            fit_alpha(&bump, &gaps, 1, 1e-8),
            Err(Error::NoLinearFit { .. })
        ));
    }

    #[test]
    fn joint_beta_satisfies_both() {
        let a = 2.0 / 3f64.sqrt();
        let (b1, b2) = joint_beta(a).unwrap();
        assert!(twogap_beta_residual(a, b1, b2) < 1e-12);
        assert!(backlund_beta_residual(a, b1, b2) < 1e-12);
    }
}
