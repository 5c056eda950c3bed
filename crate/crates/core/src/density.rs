//! Densities as parametric pairs `y -> (x(y), R(y))`.
//!
//! Every family in this crate is either a rational function of `wp` on one
//! edge line of the period rectangle (with `x(y)` a combination of `zeta` and
//! `wp'`), the hyperbolic soliton, or the reciprocal `b / R` of another
//! density with `x(y)` obtained by quadrature.

use num_complex::Complex;
use serde::Serialize;

use crate::elliptic::{HalfPeriod, LatticeParams};
use crate::error::{Error, Result};
use crate::hierarchy::{liouville_potential, PotentialSpec};
use crate::jet::Jet;
use crate::numeric::{bisect, gauss_legendre, richardson_derivative};
use crate::real::{lit, to_f64, Real};
use crate::tol::Tolerances;
use crate::yfunc::YFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Onegap,
    OnegapCusp,
    TwogapPm,
    TwogapAlpha,
    BacklundOnegap,
    BacklundTwogapPm,
    BacklundTwogapAlpha,
    Soliton,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::Onegap => "onegap",
            Self::OnegapCusp => "onegap-cusp",
            Self::TwogapPm => "twogap-pm",
            Self::TwogapAlpha => "twogap-alpha",
            Self::BacklundOnegap => "backlund-onegap",
            Self::BacklundTwogapPm => "backlund-twogap-pm",
            Self::BacklundTwogapAlpha => "backlund-twogap-alpha",
            Self::Soliton => "soliton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    Alpha(u8),
    Plus,
    Minus,
    None,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Alpha(a) => write!(f, "{a}"),
            Self::Plus => write!(f, "+"),
            Self::Minus => write!(f, "-"),
            Self::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    Smooth,
    Cusp,
    Discontinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularKind {
    Zero,
    Pole,
}

/// A zero or pole of `R` inside one `y`-period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Singularity<T> {
    pub y: T,
    pub kind: SingularKind,
    pub order: u32,
}

/// `R(y) = scale * prod (wp(z) - root)^power` with `z = i y + omega + omega_line`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalProfile<T> {
    pub scale: T,
    pub factors: Vec<(T, i32)>,
    pub line: HalfPeriod,
}

/// `x(y) = Re[slope y + sum c zeta(z + d) + sum c' wp'(z) + offset]`.
#[derive(Debug, Clone, PartialEq)]
pub struct XForm<T> {
    pub slope: T,
    pub zeta_terms: Vec<(Complex<T>, Complex<T>)>,
    pub wp_prime_terms: Vec<Complex<T>>,
    pub offset: Complex<T>,
}

#[derive(Debug, Clone)]
pub enum Shape<T: Real> {
    Elliptic {
        profile: RationalProfile<T>,
        x_map: XForm<T>,
    },
    /// `R = tanh^2(k y)`, `x = y - tanh(k y) / k`.
    Soliton { k: T },
    /// `R = b / R_source`, `x` by quadrature.
    Reciprocal { b: T, source: Box<Density<T>> },
}

#[derive(Debug, Clone)]
pub struct Density<T: Real> {
    pub family: Family,
    pub branch: Branch,
    pub shape: Shape<T>,
    pub lattice: Option<LatticeParams<T>>,
    /// `x(y + period_y) - x(y)`; infinite for the soliton.
    pub period_x: T,
    pub period_y: T,
    /// Predicted band edges, increasing.
    pub band_edges: Vec<T>,
    pub smoothness: Smoothness,
    pub singularities: Vec<Singularity<T>>,
}

const QUAD_NODES: usize = 16;

impl<T: Real> RationalProfile<T> {
    fn factor_base(&self, l: &LatticeParams<T>, y: T, root: T, jet: Option<Jet<T>>) -> Result<(T, Option<Jet<T>>)> {
        let exact = l
            .roots()
            .iter()
            .position(|&e| e == root)
            .map(|j| l.wp_edge_minus_root(y, self.line, j as u8 + 1))
            .transpose()?;
        let v = match (exact, &jet) {
            (Some(v), _) => v,
            (None, Some(j)) => j.value() - root,
            (None, None) => l.wp_edge(y, self.line)? - root,
        };
        Ok((v, jet.map(|j| (j - root).with_value(v))))
    }

    pub fn value(&self, l: &LatticeParams<T>, y: T) -> Result<T> {
        let mut out = self.scale;
        for &(root, p) in &self.factors {
            let (v, _) = self.factor_base(l, y, root, None)?;
            if p < 0 && v.abs() <= T::epsilon() {
                return Err(Error::DenominatorZero { y: to_f64(y) });
            }
            out = out * v.powi(p);
        }
        Ok(out)
    }

    pub fn jet(&self, l: &LatticeParams<T>, y: T) -> Result<Jet<T>> {
        let wp = l.wp_edge_jet(y, self.line)?;
        let mut out = Jet::constant(self.scale);
        for &(root, p) in &self.factors {
            let (v, j) = self.factor_base(l, y, root, Some(wp))?;
            if p < 0 && v.abs() <= T::epsilon() {
                return Err(Error::DenominatorZero { y: to_f64(y) });
            }
            out = out * j.expect("jet requested").powi(p);
        }
        Ok(out)
    }
}

impl<T: Real> XForm<T> {
    pub fn eval(&self, l: &LatticeParams<T>, y: T, line: HalfPeriod) -> Result<Complex<T>> {
        let z = Complex::new(l.omega, y) + l.half_period(line);
        let mut acc = Complex::new(self.slope * y, T::zero()) + self.offset;
        if !self.wp_prime_terms.is_empty() {
            let wpp = l.wp_prime(z)?;
            for c in &self.wp_prime_terms {
                acc = acc + *c * wpp;
            }
        }
        for (c, d) in &self.zeta_terms {
            acc = acc + *c * l.zeta(z + *d)?;
        }
        Ok(acc)
    }
}

impl<T: Real> Density<T> {
    /// Assembles a density and derives its period in `x` and its
    /// singularity structure.
    pub fn new(
        family: Family,
        branch: Branch,
        shape: Shape<T>,
        lattice: Option<LatticeParams<T>>,
        band_edges: Vec<T>,
    ) -> Result<Self> {
        let period_y = match (&shape, &lattice) {
            (Shape::Soliton { .. }, _) => T::infinity(),
            (Shape::Reciprocal { source, .. }, _) => source.period_y,
            (_, Some(l)) => l.omega_p * lit(2.0),
            (_, None) => return Err(Error::InvalidBranch("elliptic density without lattice".into())),
        };
        let singularities = match &shape {
            Shape::Elliptic { profile, .. } => {
                scan_profile(lattice.as_ref().expect("checked above"), profile)?
            }
            Shape::Soliton { .. } => vec![Singularity {
                y: T::zero(),
                kind: SingularKind::Zero,
                order: 2,
            }],
            Shape::Reciprocal { source, .. } => source
                .singularities
                .iter()
                .map(|s| Singularity {
                    kind: match s.kind {
                        SingularKind::Zero => SingularKind::Pole,
                        SingularKind::Pole => SingularKind::Zero,
                    },
                    ..*s
                })
                .collect(),
        };
        let smoothness = if singularities.iter().any(|s| s.kind == SingularKind::Pole) {
            Smoothness::Discontinuous
        } else if singularities.is_empty() {
            Smoothness::Smooth
        } else {
            Smoothness::Cusp
        };
        let mut d = Self {
            family,
            branch,
            shape,
            lattice,
            period_x: T::nan(),
            period_y,
            band_edges,
            smoothness,
            singularities,
        };
        d.period_x = match &d.shape {
            Shape::Soliton { .. } => T::infinity(),
            Shape::Reciprocal { .. } => d.quadrature(d.period_y)?,
            Shape::Elliptic { .. } => {
                let y0 = d.regular_point();
                d.x_raw(y0 + period_y)? - d.x_raw(y0)?
            }
        };
        Ok(d)
    }

    pub fn is_periodic(&self) -> bool {
        self.period_y.is_finite()
    }

    /// A point of `[0, period_y)` as far as possible from every singularity.
    pub fn regular_point(&self) -> T {
        if !self.is_periodic() {
            return lit(1.0);
        }
        let n = 64;
        let mut best = (T::zero(), -T::one());
        for k in 0..n {
            let y = self.period_y * lit(k as f64 / n as f64);
            let dist = self
                .singularities
                .iter()
                .map(|s| {
                    let d = (y - s.y).abs() % self.period_y;
                    d.min(self.period_y - d)
                })
                .fold(T::infinity(), |m, v| m.min(v));
            if dist > best.1 {
                best = (y, dist);
            }
        }
        best.0
    }

    /// Distance from `y` to the nearest pole of `R`.
    pub fn pole_distance(&self, y: T) -> T {
        self.singularities
            .iter()
            .filter(|s| s.kind == SingularKind::Pole)
            .map(|s| {
                let d = (y - s.y).abs() % self.period_y;
                d.min(self.period_y - d)
            })
            .fold(T::infinity(), |m, v| m.min(v))
    }

    pub fn r(&self, y: T) -> Result<T> {
        match &self.shape {
            Shape::Elliptic { profile, .. } => profile.value(self.lat(), y),
            Shape::Soliton { k } => Ok((*k * y).tanh().powi(2)),
            Shape::Reciprocal { b, source } => Ok(*b / source.r(y)?),
        }
    }

    pub fn r_jet(&self, y: T) -> Result<Jet<T>> {
        match &self.shape {
            Shape::Elliptic { profile, .. } => profile.jet(self.lat(), y),
            Shape::Soliton { k } => {
                let t = Jet::variable(y).scale(*k).tanh();
                Ok(t * t)
            }
            Shape::Reciprocal { b, source } => Ok(source.r_jet(y)?.recip().scale(*b)),
        }
    }

    /// `x(y)`.
    pub fn x(&self, y: T) -> Result<T> {
        self.x_raw(y)
    }

    /// Imaginary part discarded by [`Density::x`]; constant for the elliptic
    /// families and zero elsewhere.
    pub fn x_imag(&self, y: T) -> Result<T> {
        match &self.shape {
            Shape::Elliptic { profile, x_map } => Ok(x_map.eval(self.lat(), y, profile.line)?.im),
            _ => Ok(T::zero()),
        }
    }

    fn x_raw(&self, y: T) -> Result<T> {
        match &self.shape {
            Shape::Elliptic { profile, x_map } => Ok(x_map.eval(self.lat(), y, profile.line)?.re),
            Shape::Soliton { k } => Ok(y - (*k * y).tanh() / *k),
            Shape::Reciprocal { .. } => {
                let n = (y / self.period_y).floor();
                let rest = y - n * self.period_y;
                Ok(n * self.period_x + self.quadrature(rest)?)
            }
        }
    }

    /// `int_0^y R` for `0 <= y <= period_y`.
    fn quadrature(&self, y: T) -> Result<T> {
        if y == T::zero() {
            return Ok(T::zero());
        }
        let rule = gauss_legendre::<T>(QUAD_NODES);
        let panels = (to_f64(y / self.period_y) * 16.0).ceil().max(1.0) as usize;
        crate::numeric::integrate(|t| self.r(t), T::zero(), y, panels, &rule)
    }

    fn lat(&self) -> &LatticeParams<T> {
        self.lattice.as_ref().expect("elliptic density carries its lattice")
    }

    /// Largest `|x'(y) - R(y)| / max(1, |R|)` over `n` points of one period,
    /// with `x'` from Richardson-extrapolated central differences. Points
    /// within `window * period_y` of a pole are skipped.
    pub fn x_derivative_residual(&self, n: usize, window: T) -> Result<T> {
        let (span, start) = if self.is_periodic() {
            (self.period_y, T::zero())
        } else {
            (lit(6.0), lit(-3.0))
        };
        // sixth-order stencil: a wide step keeps roundoff on large x small,
        // but it must stay well inside the distance to the nearest pole
        let h_max = span * lit(1e-3);
        let mut worst = T::zero();
        for k in 0..n {
            let y = start + span * lit((k as f64 + 0.5) / n as f64);
            let mut h = h_max;
            if self.is_periodic() {
                let dist = self.pole_distance(y);
                if dist < window * span {
                    continue;
                }
                h = h.min(dist * lit(0.02));
            }
            let d = richardson_derivative(|t| self.x(t), y, h)?;
            let r = self.r(y)?;
            worst = worst.max((d - r).abs() / r.abs().max(T::one()));
        }
        Ok(worst)
    }

    /// `|x(y + period_y) - x(y) - period_x|` at a few regular points.
    pub fn x_period_residual(&self) -> Result<T> {
        let mut worst = T::zero();
        for k in 0..5 {
            let y = self.regular_point() + self.period_y * lit(0.01 * k as f64);
            if self.pole_distance(y) < self.period_y * lit(1e-3) {
                continue;
            }
            let d = self.x(y + self.period_y)? - self.x(y)? - self.period_x;
            worst = worst.max(d.abs());
        }
        Ok(worst)
    }

    /// Minimum and maximum of `R` on an `n`-point grid of one period.
    pub fn r_range(&self, n: usize) -> Result<(T, T)> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for k in 0..n {
            let y = self.period_y * lit(k as f64 / n as f64);
            if self.pole_distance(y) < self.period_y * lit(1e-6) {
                continue;
            }
            let r = self.r(y)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        Ok((lo, hi))
    }

    /// Schrodinger potential via the Liouville relation.
    pub fn liouville(&self) -> PotentialSpec<T> {
        let me = std::sync::Arc::new(self.clone());
        let mut u = liouville_potential(me, self.period_y, self.band_edges.clone());
        u.label = format!("liouville({} {})", self.family.name(), self.branch);
        u
    }

    /// Solves `x(y) = x` for `y`.
    ///
    /// Smooth densities use safeguarded Newton; cusp densities use bisection
    /// only. Densities with poles are rejected.
    pub fn invert_x(&self, x: T, tol: &Tolerances) -> Result<T> {
        if self.smoothness == Smoothness::Discontinuous {
            return Err(Error::NotMonotone(format!(
                "{} branch {} has poles",
                self.family.name(),
                self.branch
            )));
        }
        let newton = self.smoothness == Smoothness::Smooth;
        if !self.is_periodic() {
            let mut lo = -T::one();
            let mut hi = T::one();
            for _ in 0..200 {
                if self.x(lo)? <= x && self.x(hi)? >= x {
                    break;
                }
                lo = lo * lit(2.0);
                hi = hi * lit(2.0);
            }
            let atol = lit::<T>(tol.inversion) * x.abs().max(T::one());
            return self.solve_cell(x, lo, hi, atol, newton);
        }
        let x0 = self.x(T::zero())?;
        let n = ((x - x0) / self.period_x).floor();
        let target = x - n * self.period_x;
        let atol = lit::<T>(tol.inversion) * self.period_x.abs();
        let y = self.solve_cell(target, T::zero(), self.period_y, atol, newton)?;
        Ok(y + n * self.period_y)
    }

    fn solve_cell(&self, target: T, mut lo: T, mut hi: T, atol: T, newton: bool) -> Result<T> {
        let xlo = self.x(lo)?;
        let xhi = self.x(hi)?;
        let increasing = xhi >= xlo;
        let no_conv = |lo: T, hi: T, res: T| Error::NoConvergence {
            x: to_f64(target),
            lo: to_f64(lo),
            hi: to_f64(hi),
            residual: to_f64(res),
        };
        if (target - xlo) * (target - xhi) > T::zero() {
            return Err(no_conv(lo, hi, (target - xlo).abs().min((target - xhi).abs())));
        }
        let mut y = if xhi != xlo {
            lo + (hi - lo) * (target - xlo) / (xhi - xlo)
        } else {
            (lo + hi) / lit(2.0)
        };
        let mut g = T::infinity();
        for _ in 0..300 {
            g = self.x(y)? - target;
            if g.abs() <= atol {
                return Ok(y);
            }
            if (g > T::zero()) == increasing {
                hi = y;
            } else {
                lo = y;
            }
            let mid = (lo + hi) / lit(2.0);
            if mid == lo || mid == hi {
                break;
            }
            y = if newton {
                let r = self.r(y)?;
                let step = y - g / r;
                if r != T::zero() && step > lo && step < hi {
                    step
                } else {
                    mid
                }
            } else {
                mid
            };
        }
        Err(no_conv(lo, hi, g.abs()))
    }

    /// Table of `(x, r(x), y(x))` on a uniform `x` grid.
    pub fn sample(&self, x_min: T, x_max: T, n: usize, tol: &Tolerances) -> Result<Vec<(T, T, T)>> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let x = x_min + (x_max - x_min) * lit(k as f64 / (n - 1) as f64);
                let y = self.invert_x(x, tol)?;
                Ok((x, self.r(y)?, y))
            })
            .collect()
    }

    /// Table of `(x(y), R(y), y)` on a uniform `y` grid, skipping points within
    /// `window * period_y` of a pole. Works for every smoothness class.
    pub fn sample_y(&self, y_min: T, y_max: T, n: usize, window: T) -> Result<Vec<(T, T, T)>> {
        let n = n.max(2);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let y = y_min + (y_max - y_min) * lit(k as f64 / (n - 1) as f64);
            if self.is_periodic() && self.pole_distance(y) < window * self.period_y {
                continue;
            }
            out.push((self.x(y)?, self.r(y)?, y));
        }
        Ok(out)
    }
}

impl<T: Real> YFunction<T> for Density<T> {
    fn jet(&self, y: T) -> Result<Jet<T>> {
        self.r_jet(y)
    }

    fn value(&self, y: T) -> Result<T> {
        self.r(y)
    }
}

/// Zeros and poles of a rational profile within one `y`-period.
fn scan_profile<T: Real>(l: &LatticeParams<T>, p: &RationalProfile<T>) -> Result<Vec<Singularity<T>>> {
    let half = l.omega_p;
    let period = half * lit(2.0);
    // value of wp at y = 0 and y = |omega'| on this line; infinite means a pole
    let (at0, at_half) = match p.line {
        HalfPeriod::Zero => (l.e1, l.e2),
        HalfPeriod::Three => (l.e2, l.e1),
        HalfPeriod::One => (T::neg_infinity(), l.e3),
        HalfPeriod::Two => (l.e3, T::neg_infinity()),
    };
    let mut out: Vec<Singularity<T>> = Vec::new();
    let mut push = |y: T, power: i64| {
        if power == 0 {
            return;
        }
        let kind = if power > 0 { SingularKind::Zero } else { SingularKind::Pole };
        out.push(Singularity {
            y,
            kind,
            order: power.unsigned_abs() as u32,
        });
    };
    let scale = l.e1.abs().max(l.e3.abs());
    let same = |a: T, b: T| (a - b).abs() <= lit::<T>(1e-12) * scale;
    for &(root, pw) in &p.factors {
        let pw = pw as i64;
        if same(root, at0) {
            push(T::zero(), 2 * pw);
        } else if same(root, at_half) {
            push(half, 2 * pw);
        } else {
            let (lo, hi) = l.edge_range(p.line);
            if root > lo && root < hi {
                let f = |y: T| -> Result<T> { Ok(l.wp_edge(y, p.line)? - root) };
                let a = if at0.is_finite() { T::zero() } else { half * lit(1e-6) };
                let b = if at_half.is_finite() { half } else { half * lit(1.0 - 1e-6) };
                let y = bisect(f, a, b, half * T::epsilon() * lit(4.0))?;
                push(y, pw);
                push(period - y, pw);
            }
        }
    }
    // wp itself has a double pole on lines 1 and 2
    let net: i64 = p.factors.iter().map(|&(_, pw)| pw as i64).sum();
    if !at0.is_finite() {
        push(T::zero(), -2 * net);
    }
    if !at_half.is_finite() {
        push(half, -2 * net);
    }
    out.sort_by(|a, b| a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}
