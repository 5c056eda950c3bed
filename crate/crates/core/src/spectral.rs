//! Floquet theory for the Schrodinger and string operators: Hill
//! discriminant, band edges and comparison with predicted edges.

use std::sync::Arc;

use rayon::prelude::*;

use crate::density::{Density, Smoothness};
use crate::error::{Error, Result};
use crate::hierarchy::PotentialSpec;
use crate::numeric::bisect;
use crate::ode::transfer_matrix;
use crate::real::{lit, to_f64, Real};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `-psi'' + u psi = lambda psi` in `y`.
    Schrodinger,
    /// `psi'' + lambda r(x)^{-2} psi = 0` in `x`.
    String,
    /// The string operator written in `y`: `psi' = R p`, `p' = -lambda psi / R`.
    StringInY,
}

type Coef<T> = Arc<dyn Fn(T) -> Result<(T, T, T)> + Send + Sync>;

/// A periodic operator reduced to `psi' = a p`, `p' = (q - lambda w) psi`.
#[derive(Clone)]
pub struct PeriodicOperator<T: Real> {
    pub kind: OperatorKind,
    pub period: T,
    /// `t -> (a, q, w)`.
    coef: Coef<T>,
    tol: Tolerances,
}

impl<T: Real> std::fmt::Debug for PeriodicOperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicOperator")
            .field("kind", &self.kind)
            .field("period", &self.period)
            .finish()
    }
}

impl<T: Real> PeriodicOperator<T> {
    pub fn schrodinger(u: PotentialSpec<T>, tol: Tolerances) -> Self {
        let period = u.period_y;
        Self {
            kind: OperatorKind::Schrodinger,
            period,
            coef: Arc::new(move |t| Ok((T::one(), u.value(t)?, T::one()))),
            tol,
        }
    }

    /// String operator with an explicit density `rho(x)` and period.
    pub fn string_with<F>(rho: F, period: T, tol: Tolerances) -> Self
    where
        F: Fn(T) -> Result<T> + Send + Sync + 'static,
    {
        Self {
            kind: OperatorKind::String,
            period,
            coef: Arc::new(move |t| Ok((T::one(), T::zero(), rho(t)?))),
            tol,
        }
    }

    /// String operator of a smooth density; `rho(x) = 1 / r(x)^2` evaluated
    /// through `x -> y` inversion and the closed form of `R`.
    pub fn string(d: &Density<T>, tol: Tolerances) -> Result<Self> {
        Self::admissible(d)?;
        let dd = d.clone();
        let period = d.period_x.abs();
        Ok(Self::string_with(
            move |x| {
                let y = dd.invert_x(x, &tol)?;
                let r = dd.r(y)?;
                Ok(T::one() / (r * r))
            },
            period,
            tol,
        ))
    }

    /// The same spectral problem integrated in `y`, avoiding inversion.
    pub fn string_in_y(d: &Density<T>, tol: Tolerances) -> Result<Self> {
        Self::admissible(d)?;
        let dd = d.clone();
        Ok(Self {
            kind: OperatorKind::StringInY,
            period: d.period_y,
            coef: Arc::new(move |y| {
                let r = dd.r(y)?;
                Ok((r, T::zero(), T::one() / r))
            }),
            tol,
        })
    }

    /// Rejects densities without a well-posed periodic spectral problem.
    pub fn admissible(d: &Density<T>) -> Result<()> {
        if d.smoothness != Smoothness::Smooth || !d.is_periodic() {
            return Err(Error::InvalidOperator(format!(
                "{} branch {} is not a smooth periodic density",
                d.family.name(),
                d.branch
            )));
        }
        let (lo, hi) = d.r_range(128)?;
        if !(lo > T::zero()) {
            return Err(Error::InvalidOperator(format!(
                "density must be positive, min R = {lo}, max R = {hi}"
            )));
        }
        Ok(())
    }

    /// `int sqrt(a w)` over one period: the phase length of large-lambda
    /// oscillations.
    pub fn effective_length(&self) -> Result<T> {
        let n = 128;
        let mut s = T::zero();
        for k in 0..n {
            let t = self.period * lit(k as f64 / n as f64);
            let (a, _, w) = (self.coef)(t)?;
            s = s + (a * w).abs().sqrt();
        }
        Ok(s * self.period / lit(n as f64))
    }

    /// Monodromy matrix without the determinant check.
    pub fn monodromy_raw(&self, lambda: T) -> Result<[[T; 2]; 2]> {
        let coef = &self.coef;
        transfer_matrix(
            |t| {
                let (a, q, w) = coef(t)?;
                Ok((a, q - lambda * w))
            },
            self.period,
            lit(self.tol.ode_local),
        )
    }

    /// Monodromy matrix at `lambda`; rejected if its determinant drifts.
    pub fn monodromy(&self, lambda: T) -> Result<[[T; 2]; 2]> {
        let m = self.monodromy_raw(lambda)?;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !((det - T::one()).abs() <= lit(self.tol.wronskian)) {
            return Err(Error::WronskianDrift {
                det: to_f64(det),
                lambda: to_f64(lambda),
            });
        }
        Ok(m)
    }

    /// Hill discriminant `trace M(lambda)`.
    pub fn discriminant(&self, lambda: T) -> Result<T> {
        let m = self.monodromy(lambda)?;
        Ok(m[0][0] + m[1][1])
    }

    /// Lower bound for the spectrum.
    fn lambda_floor(&self, lambda_max: T) -> Result<T> {
        match self.kind {
            OperatorKind::Schrodinger => {
                let mut lo = T::infinity();
                for k in 0..256 {
                    let t = self.period * lit(k as f64 / 256.0);
                    lo = lo.min((self.coef)(t)?.1);
                }
                Ok(lo - lit::<T>(0.05) * (lambda_max - lo).abs() - lit(0.1))
            }
            _ => Ok(-(lit::<T>(0.02) * lambda_max.abs() + lit(0.1))),
        }
    }
}

pub fn hill_discriminant<T: Real>(op: &PeriodicOperator<T>, lambda: T) -> Result<T> {
    op.discriminant(lambda)
}

/// Measured band structure.
#[derive(Debug, Clone)]
pub struct BandStructure<T> {
    /// Finite band edges, increasing.
    pub edges: Vec<T>,
    /// Sign of the discriminant (`+2` or `-2`) at each edge.
    pub edge_signs: Vec<i8>,
    /// Closed bands; the last is unbounded above.
    pub bands: Vec<(T, T)>,
    pub discriminant_samples: Vec<(T, T)>,
}

/// Locates all finite band edges below `lambda_max`; expects exactly
/// `n_expected`.
pub fn band_edges<T: Real>(
    op: &PeriodicOperator<T>,
    lambda_max: T,
    n_expected: usize,
) -> Result<BandStructure<T>> {
    let lo = op.lambda_floor(lambda_max)?;
    band_edges_in(op, lo, lambda_max, n_expected)
}

/// As [`band_edges`] on an explicit range.
pub fn band_edges_in<T: Real>(
    op: &PeriodicOperator<T>,
    lambda_min: T,
    lambda_max: T,
    n_expected: usize,
) -> Result<BandStructure<T>> {
    let len = op.effective_length()?;
    let span = lambda_max.max(T::zero()).sqrt() * len / T::PI();
    let n = ((to_f64(span) + 2.0) * 64.0).ceil().clamp(64.0, 20_000.0) as usize;
    let grid: Vec<T> = (0..=n)
        .map(|k| lambda_min + (lambda_max - lambda_min) * lit(k as f64 / n as f64))
        .collect();
    let values: Vec<T> = grid
        .par_iter()
        .map(|&l| op.discriminant(l))
        .collect::<Result<Vec<T>>>()?;
    let samples: Vec<(T, T)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let diag = || samples.iter().map(|&(l, d)| (to_f64(l), to_f64(d))).collect::<Vec<_>>();
    // gap detection threshold above numerical noise of the discriminant
    let thr: T = lit(1e-8);
    let in_gap = |d: T| d.abs() - lit(2.0) > thr;
    if !in_gap(values[0]) || in_gap(values[n]) {
        return Err(Error::RangeTooSmall {
            lo: to_f64(lambda_min),
            hi: to_f64(lambda_max),
        });
    }
    let mut brackets = Vec::new();
    for k in 0..n {
        if in_gap(values[k]) != in_gap(values[k + 1]) {
            let gap_side = if in_gap(values[k]) { values[k] } else { values[k + 1] };
            let s = if gap_side > T::zero() { T::one() } else { -T::one() };
            brackets.push((grid[k], grid[k + 1], s));
        }
    }
    let edges: Vec<(T, T)> = brackets
        .par_iter()
        .map(|&(a, b, s)| {
            let e = bisect(
                |l| Ok(s * op.discriminant(l)? - lit(2.0)),
                a,
                b,
                lit(op.tol.bisection),
            )?;
            Ok((e, s))
        })
        .collect::<Result<Vec<_>>>()?;
    if edges.len() != n_expected {
        return Err(Error::EdgeCountMismatch {
            found: edges.len(),
            expected: n_expected,
            samples: diag(),
        });
    }
    let mut bands = Vec::new();
    let mut k = 0;
    while k < edges.len() {
        let hi = if k + 1 < edges.len() { edges[k + 1].0 } else { T::infinity() };
        bands.push((edges[k].0, hi));
        k += 2;
    }
    Ok(BandStructure {
        edge_signs: edges.iter().map(|e| if e.1 > T::zero() { 2 } else { -2 }).collect(),
        edges: edges.into_iter().map(|e| e.0).collect(),
        bands,
        discriminant_samples: samples,
    })
}

/// `max |a_i - b_i|` over paired lists; infinite on length mismatch.
pub fn max_deviation<T: Real>(a: &[T], b: &[T]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

/// Band edges of a smooth density from both operator forms.
#[derive(Debug, Clone)]
pub struct SpectrumComparison<T> {
    pub schrodinger: BandStructure<T>,
    pub string: BandStructure<T>,
    pub predicted: Vec<T>,
    pub max_dev_schrodinger: T,
    pub max_dev_string: T,
    pub max_dev_between: T,
}

/// Scan range covering the predicted edges with some margin.
pub fn scan_max<T: Real>(edges: &[T]) -> T {
    let first = edges.first().copied().unwrap_or(T::zero());
    let last = edges.last().copied().unwrap_or(T::one());
    last + lit::<T>(0.25) * (last - first).abs() + lit(0.5)
}

pub fn verify_spectrum<T: Real>(d: &Density<T>, tol: &Tolerances) -> Result<SpectrumComparison<T>> {
    let lmax = scan_max(&d.band_edges);
    let n = d.band_edges.len();
    let schr = PeriodicOperator::schrodinger(d.liouville(), *tol);
    let s = band_edges(&schr, lmax, n)?;
    let string = PeriodicOperator::string(d, *tol)?;
    let x = band_edges(&string, lmax, n)?;
    Ok(SpectrumComparison {
        max_dev_schrodinger: max_deviation(&s.edges, &d.band_edges),
        max_dev_string: max_deviation(&x.edges, &d.band_edges),
        max_dev_between: max_deviation(&s.edges, &x.edges),
        predicted: d.band_edges.clone(),
        schrodinger: s,
        string: x,
    })
}

/// `|Delta(lambda) - 2 cos(sqrt(lambda) L)| / 2` at the `lambda` nearest to
/// `lambda_target` where `sqrt(lambda) L` is a multiple of `2 pi`.
pub fn asymptotic_residual<T: Real>(op: &PeriodicOperator<T>, lambda_target: T) -> Result<(T, T)> {
    let len = op.effective_length()?;
    let k = (lambda_target.sqrt() * len / (T::PI() * lit(2.0))).round().max(T::one());
    let lambda = (T::PI() * lit::<T>(2.0) * k / len).powi(2);
    let d = op.discriminant(lambda)?;
    Ok((lambda, (d - lit(2.0)).abs() / lit(2.0)))
}
