//! Weierstrass elliptic functions for rectangular lattices with real roots.
//!
//! Evaluation goes through Jacobi theta series. The lattice is viewed either
//! directly (real half-period `omega`) or rotated by `i` (real half-period
//! `|omega'|`), whichever has the smaller nome, so the series never needs more
//! than a handful of terms: `max(q, q_dual) <= exp(-pi)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, JET_LEN};
use crate::real::{lit, to_f64, Real};

/// Half-period index: `0` is no shift, `1..=3` are `omega_1 = omega`,
/// `omega_2 = omega + omega'`, `omega_3 = omega'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HalfPeriod {
    Zero,
    One,
    Two,
    Three,
}

impl HalfPeriod {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            _ => Err(Error::InvalidBranch(format!("half-period index {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Zero => 0,
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
        }
    }
}

/// Values of `wp`, `wp'` and `zeta` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpValues<T> {
    pub wp: Complex<T>,
    pub wp_prime: Complex<T>,
    pub zeta: Complex<T>,
}

/// Theta-series data for one orientation of the lattice.
#[derive(Debug, Clone, PartialEq)]
struct Orientation<T> {
    omega: T,
    q: T,
    /// Roots in this orientation, decreasing.
    roots: [T; 3],
    eta: T,
    /// `q^((n+1/2)^2)` for n = 0, 1, ...
    q_half: Vec<T>,
    /// `q^(n^2)` for n = 0, 1, ...
    q_int: Vec<T>,
    th1p0: T,
    th2_0: T,
    th3_0: T,
    th4_0: T,
}

struct Thetas<T> {
    t1: Complex<T>,
    t1p: Complex<T>,
    t2: Complex<T>,
    t3: Complex<T>,
    t4: Complex<T>,
}

impl<T: Real> Orientation<T> {
    fn new(omega: T, q: T, roots: [T; 3]) -> Self {
        let tiny: T = T::min_positive_value() / T::epsilon();
        let mut q_half = Vec::new();
        let mut q_int = Vec::new();
        for n in 0..64 {
            let nf: T = lit(n as f64);
            let h = q.powf((nf + lit(0.5)).powi(2));
            let i = q.powf(nf * nf);
            if n > 1 && h < tiny && i < tiny {
                break;
            }
            q_half.push(h);
            q_int.push(i);
        }
        let mut o = Self {
            omega,
            q,
            roots,
            eta: T::zero(),
            q_half,
            q_int,
            th1p0: T::zero(),
            th2_0: T::zero(),
            th3_0: T::zero(),
            th4_0: T::zero(),
        };
        let th = o.thetas(Complex::new(T::zero(), T::zero()));
        o.th1p0 = th.t1p.re;
        o.th2_0 = th.t2.re;
        o.th3_0 = th.t3.re;
        o.th4_0 = th.t4.re;
        // eta = -pi^2 theta1'''(0) / (12 omega theta1'(0))
        let mut t3 = T::zero();
        for (n, &w) in o.q_half.iter().enumerate() {
            let k: T = lit((2 * n + 1) as f64);
            let s = if n % 2 == 0 { T::one() } else { -T::one() };
            t3 = t3 - lit::<T>(2.0) * s * w * k * k * k;
        }
        o.eta = -(T::PI() * T::PI()) * t3 / (lit::<T>(12.0) * omega * o.th1p0);
        o
    }

    fn thetas(&self, v: Complex<T>) -> Thetas<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let two: T = lit(2.0);
        let growth = v.im.abs();
        let (mut t1, mut t1p, mut t2) = (zero, zero, zero);
        let (mut t3, mut t4) = (one, one);
        for (n, &w) in self.q_half.iter().enumerate() {
            let k: T = lit((2 * n + 1) as f64);
            let bound = w * (k * growth).exp();
            if n > 0 && bound < T::epsilon() * T::epsilon() {
                break;
            }
            let kv = v * k;
            let (s, c) = (kv.sin(), kv.cos());
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            t1 = t1 + s * (two * sign * w);
            t1p = t1p + c * (two * sign * w * k);
            t2 = t2 + c * (two * w);
        }
        for (n, &w) in self.q_int.iter().enumerate().skip(1) {
            let k: T = lit((2 * n) as f64);
            let bound = w * (k * growth).exp();
            if n > 1 && bound < T::epsilon() * T::epsilon() {
                break;
            }
            let c = (v * k).cos();
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            t3 = t3 + c * (two * w);
            t4 = t4 + c * (two * sign * w);
        }
        Thetas { t1, t1p, t2, t3, t4 }
    }

    fn scale(&self) -> T {
        T::PI() / (lit::<T>(2.0) * self.omega)
    }

    /// `wp`, `wp'`, `zeta` at a point of the reduced rectangle.
    fn eval(&self, z: Complex<T>) -> WpValues<T> {
        let k = self.scale();
        let v = z * k;
        let th = self.thetas(v);
        let r = th.t2 * (k * self.th1p0 / self.th2_0) / th.t1;
        let wp = r * r + self.roots[0];
        let wp_prime = -(th.t2 * th.t3 * th.t4) * (lit::<T>(2.0) * k * k * k * self.th1p0 * self.th1p0)
            / (th.t1 * th.t1 * th.t1);
        let zeta = z * (self.eta / self.omega) + th.t1p / th.t1 * k;
        WpValues { wp, wp_prime, zeta }
    }

    /// `wp(z) - roots[j]` without cancellation near the root.
    fn wp_minus_root(&self, z: Complex<T>, j: usize) -> Complex<T> {
        let k = self.scale();
        let th = self.thetas(z * k);
        let r = match j {
            0 => th.t2 * (k * self.th1p0 / self.th2_0),
            1 => th.t3 * (k * self.th2_0 * self.th4_0),
            _ => th.t4 * (k * self.th2_0 * self.th3_0),
        } / th.t1;
        r * r
    }
}

/// Weierstrass data for a rectangular lattice with real roots `e3 < e2 < e1`.
///
/// `omega_p` stores `|omega'|` (the half-period itself is `i * omega_p`) and
/// `eta_p` stores the imaginary part of `eta' = zeta(omega')`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParams<T> {
    pub e1: T,
    pub e2: T,
    pub e3: T,
    pub g2: T,
    pub g3: T,
    pub omega: T,
    pub omega_p: T,
    pub eta: T,
    pub eta_p: T,
    /// Evaluations closer than this to a lattice point fail with `PoleProximity`.
    pub pole_radius: T,
    orient: Orientation<T>,
    rotated: bool,
}

/// Arithmetic-geometric mean.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..64 {
        let an = (a + b) / lit(2.0);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= T::epsilon() * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

impl<T: Real> LatticeParams<T> {
    pub fn from_roots(e1: T, e2: T, e3: T) -> Result<Self> {
        let f = |x: T| to_f64(x);
        if !(e1.is_finite() && e2.is_finite() && e3.is_finite()) {
            return Err(Error::NonRealRoots(f(e1), f(e2), f(e3)));
        }
        if !(e3 < e2 && e2 < e1) {
            return Err(Error::UnorderedRoots(f(e1), f(e2), f(e3)));
        }
        let sum = e1 + e2 + e3;
        let mag = e1.abs().max(e3.abs()).max(T::one());
        let sum_tol = lit::<T>(1e-12).max(T::epsilon() * lit(64.0)) * mag;
        if sum.abs() > sum_tol {
            return Err(Error::NonZeroSum(f(sum)));
        }
        let two: T = lit(2.0);
        let four: T = lit(4.0);
        let g2 = -four * (e1 * e2 + e2 * e3 + e3 * e1);
        let g3 = four * e1 * e2 * e3;
        let omega = T::PI() / (two * agm((e1 - e3).sqrt(), (e1 - e2).sqrt()));
        let omega_p = T::PI() / (two * agm((e1 - e3).sqrt(), (e2 - e3).sqrt()));
        let q = (-T::PI() * omega_p / omega).exp();
        let q_dual = (-T::PI() * omega / omega_p).exp();
        let direct = Orientation::new(omega, q, [e1, e2, e3]);
        let dual = Orientation::new(omega_p, q_dual, [-e3, -e2, -e1]);
        let half = T::PI() / two;
        // Legendre: eta |omega'| - eta'_im omega = pi/2. Each eta comes from its
        // own theta series unless that nome is too large to be accurate.
        let moderate: T = lit(0.5);
        let eta = if q <= moderate {
            direct.eta
        } else {
            (-dual.eta * omega + half) / omega_p
        };
        let eta_p = if q_dual <= moderate {
            -dual.eta
        } else {
            (eta * omega_p - half) / omega
        };
        let rotated = q > q_dual;
        Ok(Self {
            e1,
            e2,
            e3,
            g2,
            g3,
            omega,
            omega_p,
            eta,
            eta_p,
            pole_radius: lit(1e-8),
            orient: if rotated { dual } else { direct },
            rotated,
        })
    }

    pub fn with_pole_radius(mut self, r: T) -> Self {
        self.pole_radius = r;
        self
    }

    /// Roots `[e1, e2, e3]`.
    pub fn roots(&self) -> [T; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// `e_alpha` for `alpha` in 1..=3.
    pub fn root(&self, alpha: u8) -> T {
        self.roots()[(alpha as usize - 1) % 3]
    }

    /// `H_alpha^2 = (e_alpha - e_beta)(e_alpha - e_gamma)`.
    pub fn h2(&self, alpha: u8) -> T {
        let (a, b, c) = others(alpha);
        (self.root(a) - self.root(b)) * (self.root(a) - self.root(c))
    }

    /// Nome of the orientation used for evaluation.
    pub fn nome(&self) -> T {
        self.orient.q
    }

    pub fn half_period(&self, h: HalfPeriod) -> Complex<T> {
        let z = T::zero();
        match h {
            HalfPeriod::Zero => Complex::new(z, z),
            HalfPeriod::One => Complex::new(self.omega, z),
            HalfPeriod::Two => Complex::new(self.omega, self.omega_p),
            HalfPeriod::Three => Complex::new(z, self.omega_p),
        }
    }

    /// `eta_alpha = zeta(omega_alpha)`; zero for the null shift.
    pub fn eta_of(&self, h: HalfPeriod) -> Complex<T> {
        let z = T::zero();
        match h {
            HalfPeriod::Zero => Complex::new(z, z),
            HalfPeriod::One => Complex::new(self.eta, z),
            HalfPeriod::Two => Complex::new(self.eta, self.eta_p),
            HalfPeriod::Three => Complex::new(z, self.eta_p),
        }
    }

    /// `eta |omega'| - Im(eta') omega - pi/2`.
    pub fn legendre_residual(&self) -> T {
        self.eta * self.omega_p - self.eta_p * self.omega - T::PI() / lit(2.0)
    }

    /// Reduces `z` to the period rectangle centred at the origin.
    fn reduce(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let two: T = lit(2.0);
        let m = (z.re / (two * self.omega)).round();
        let n = (z.im / (two * self.omega_p)).round();
        let z0 = Complex::new(z.re - two * m * self.omega, z.im - two * n * self.omega_p);
        let shift = Complex::new(two * m * self.eta, two * n * self.eta_p);
        (z0, shift)
    }

    fn guard(&self, z0: Complex<T>) -> Result<()> {
        if z0.norm() < self.pole_radius {
            return Err(Error::PoleProximity {
                re: to_f64(z0.re),
                im: to_f64(z0.im),
                radius: to_f64(self.pole_radius),
            });
        }
        Ok(())
    }

    fn eval_reduced(&self, z0: Complex<T>) -> WpValues<T> {
        if self.rotated {
            let i = Complex::new(T::zero(), T::one());
            let w = self.orient.eval(i * z0);
            WpValues {
                wp: -w.wp,
                wp_prime: -(i * w.wp_prime),
                zeta: i * w.zeta,
            }
        } else {
            self.orient.eval(z0)
        }
    }

    /// `wp`, `wp'` and `zeta` at `z`.
    pub fn eval(&self, z: Complex<T>) -> Result<WpValues<T>> {
        let (z0, shift) = self.reduce(z);
        self.guard(z0)?;
        let mut w = self.eval_reduced(z0);
        w.zeta = w.zeta + shift;
        Ok(w)
    }

    /// Evaluation without period reduction; accurate only near the
    /// fundamental rectangle. Useful to test quasi-periodicity.
    pub fn eval_unreduced(&self, z: Complex<T>) -> WpValues<T> {
        self.eval_reduced(z)
    }

    pub fn wp(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval(z)?.wp)
    }

    pub fn wp_prime(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval(z)?.wp_prime)
    }

    pub fn zeta(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.eval(z)?.zeta)
    }

    /// `wp(z) - e_alpha` computed without cancellation.
    pub fn wp_minus_root(&self, z: Complex<T>, alpha: u8) -> Result<Complex<T>> {
        let (z0, _) = self.reduce(z);
        self.guard(z0)?;
        let j = (alpha as usize - 1) % 3;
        if self.rotated {
            // wp(z) - e_j = -(wp~(iz) - e~_{3-j}) with e~ = (-e3, -e2, -e1)
            let i = Complex::new(T::zero(), T::one());
            Ok(-self.orient.wp_minus_root(i * z0, 2 - j))
        } else {
            Ok(self.orient.wp_minus_root(z0, j))
        }
    }

    /// Taylor coefficients of `wp` at `z` up to `order`, from the recursion
    /// `wp'' = 6 wp^2 - g2/2`.
    pub fn wp_taylor(&self, z: Complex<T>, order: usize) -> Result<Vec<Complex<T>>> {
        let w = self.eval(z)?;
        let mut p = vec![w.wp, w.wp_prime];
        let six: T = lit(6.0);
        for k in 0..order.saturating_sub(1) {
            let mut conv = Complex::new(T::zero(), T::zero());
            for j in 0..=k {
                conv = conv + p[j] * p[k - j];
            }
            let mut rhs = conv * six;
            if k == 0 {
                rhs.re = rhs.re - self.g2 / lit(2.0);
            }
            let denom: T = lit(((k + 2) * (k + 1)) as f64);
            p.push(rhs / denom);
        }
        p.truncate(order + 1);
        Ok(p)
    }

    fn edge_point(&self, y: T, shift: HalfPeriod) -> Complex<T> {
        Complex::new(self.omega, y) + self.half_period(shift)
    }

    fn check_real(&self, v: Complex<T>) -> Result<T> {
        let tol: T = lit::<T>(1e-10).max(T::epsilon() * lit(1e3));
        if v.im.abs() > tol * v.re.abs().max(T::one()) {
            return Err(Error::NonRealResult {
                re: to_f64(v.re),
                im: to_f64(v.im),
            });
        }
        Ok(v.re)
    }

    /// `wp(i y + omega + omega_shift)`, which is real for real `y`.
    pub fn wp_edge(&self, y: T, shift: HalfPeriod) -> Result<T> {
        self.check_real(self.wp(self.edge_point(y, shift))?)
    }

    /// `wp(i y + omega + omega_shift) - e_alpha`, accurate near the root.
    pub fn wp_edge_minus_root(&self, y: T, shift: HalfPeriod, alpha: u8) -> Result<T> {
        self.check_real(self.wp_minus_root(self.edge_point(y, shift), alpha)?)
    }

    /// Jet in `y` of `y -> wp(i y + omega + omega_shift)`.
    pub fn wp_edge_jet(&self, y: T, shift: HalfPeriod) -> Result<Jet<T>> {
        let coeffs = self.wp_taylor(self.edge_point(y, shift), JET_LEN - 1)?;
        let mut ipow = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let scale = coeffs.iter().fold(T::one(), |m, c| m.max(c.norm()));
        let tol: T = lit::<T>(1e-10).max(T::epsilon() * lit(1e3)) * scale;
        let mut real = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let v = c * ipow;
            if v.im.abs() > tol {
                return Err(Error::NonRealResult {
                    re: to_f64(v.re),
                    im: to_f64(v.im),
                });
            }
            real.push(v.re);
            ipow = ipow * i;
        }
        Ok(Jet::from_coeffs(&real))
    }

    /// Real range of `wp` on the line `i y + omega + omega_shift`: `[e2, e1]`
    /// for shifts 0 and 3, `(-inf, e3]` for shifts 1 and 2.
    pub fn edge_range(&self, shift: HalfPeriod) -> (T, T) {
        match shift {
            HalfPeriod::Zero | HalfPeriod::Three => (self.e2, self.e1),
            HalfPeriod::One | HalfPeriod::Two => (T::neg_infinity(), self.e3),
        }
    }

    /// Solves `wp(gamma) = target` for real `target` on the boundary of the
    /// quarter rectangle `[0, omega] x [0, |omega'|]`, where `wp` is real and
    /// monotone.
    pub fn solve_wp_real(&self, target: T) -> Result<Complex<T>> {
        if !target.is_finite() {
            return Err(Error::GammaNotFound {
                target: to_f64(target),
            });
        }
        let tol = T::epsilon() * self.omega.max(self.omega_p) * lit(4.0);
        let zero = T::zero();
        let point = |t: T| -> Complex<T> {
            if target >= self.e1 {
                Complex::new(t, zero)
            } else if target >= self.e2 {
                Complex::new(self.omega, t)
            } else if target >= self.e3 {
                Complex::new(t, self.omega_p)
            } else {
                Complex::new(zero, t)
            }
        };
        let (lo, hi) = if target >= self.e1 || (target < self.e2 && target >= self.e3) {
            (zero, self.omega)
        } else {
            (zero, self.omega_p)
        };
        let f = |t: T| -> Result<T> {
            let p = point(t);
            if p.norm() < self.pole_radius {
                // approaching the pole at the origin: wp -> +inf on the real
                // axis, -inf on the imaginary axis
                return Ok(if target >= self.e1 { T::infinity() } else { T::neg_infinity() });
            }
            Ok(self.wp(p)?.re - target)
        };
        let lo = lo + self.pole_radius * lit(2.0);
        let t = crate::numeric::bisect(f, lo, hi, tol)?;
        let mut g = point(t);
        // Newton polish where wp' is not small
        for _ in 0..3 {
            let w = self.eval(g)?;
            if w.wp_prime.norm() < lit(1e-6) {
                break;
            }
            let step = (w.wp - Complex::new(target, zero)) / w.wp_prime;
            if step.norm() > lit(1e-6) {
                break;
            }
            g = g - step;
        }
        Ok(g)
    }
}

/// The ordered complement `(alpha, beta, gamma)` of `alpha` in {1, 2, 3}.
pub fn others(alpha: u8) -> (u8, u8, u8) {
    match alpha {
        1 => (1, 2, 3),
        2 => (2, 3, 1),
        _ => (3, 1, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixture() -> LatticeParams<f64> {
        LatticeParams::from_roots(1.0, 0.0, -1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn invariants_of_fixture() {
        let l = fixture();
        assert_eq!(l.g2, 4.0);
        assert_eq!(l.g3, 0.0);
        assert_relative_eq!(l.omega, 1.3110287771460599, epsilon = 1e-13);
        assert_relative_eq!(l.omega_p, 1.3110287771460599, epsilon = 1e-13);
        assert_relative_eq!(l.eta, 0.5990701173677961, epsilon = 1e-13);
        assert_relative_eq!(l.eta_p, -0.5990701173677961, epsilon = 1e-13);
        assert!(l.legendre_residual().abs() < 1e-12);
    }

    #[test]
    fn lemniscatic_eta_oracle() {
        // g3 = 0: eta = pi / (4 omega)
        let l = fixture();
        assert_relative_eq!(l.eta, std::f64::consts::PI / (4.0 * l.omega), epsilon = 1e-13);
    }

    #[test]
    fn rejects_bad_roots() {
        assert!(matches!(
            LatticeParams::from_roots(0.0, 1.0, -1.0),
            Err(Error::UnorderedRoots(..))
        ));
        assert!(matches!(
            LatticeParams::from_roots(1.0, 0.0, -0.5),
            Err(Error::NonZeroSum(_))
        ));
        assert!(matches!(
            LatticeParams::from_roots(f64::NAN, 0.0, -1.0),
            Err(Error::NonRealRoots(..))
        ));
    }

    #[test]
    fn half_period_values() {
        let l = fixture();
        assert!((l.wp(l.half_period(HalfPeriod::One)).unwrap() - 1.0).norm() < 1e-13);
        assert!(l.wp(l.half_period(HalfPeriod::Two)).unwrap().norm() < 1e-13);
        assert!((l.wp(l.half_period(HalfPeriod::Three)).unwrap() + 1.0).norm() < 1e-13);
        let z = l.zeta(l.half_period(HalfPeriod::Two)).unwrap();
        assert!((z - l.eta_of(HalfPeriod::Two)).norm() < 1e-13);
    }

    #[test]
    fn edge_examples() {
        let l = fixture();
        assert_relative_eq!(l.wp_edge(0.0, HalfPeriod::Zero).unwrap(), 1.0, epsilon = 1e-13);
        assert!(l.wp_edge(0.0, HalfPeriod::Three).unwrap().abs() < 1e-13);
        assert_relative_eq!(
            l.wp_edge(l.omega_p, HalfPeriod::Three).unwrap(),
            1.0,
            epsilon = 1e-13
        );
        assert!(matches!(
            l.wp_edge(0.0, HalfPeriod::One),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn laurent_expansion_near_origin() {
        // wp(z) = 1/z^2 + g2 z^2 / 20 + g3 z^4 / 28 + O(z^6)
        let l = LatticeParams::from_roots(1.5, -0.2, -1.3).unwrap();
        let z = c(0.013, 0.007);
        let laurent = z.powi(-2) + z * z * (l.g2 / 20.0) + z.powi(4) * (l.g3 / 28.0);
        let w = l.wp(z).unwrap();
        assert!((w - laurent).norm() / w.norm() < 1e-11);
    }

    #[test]
    fn taylor_recursion_matches_finite_differences() {
        let l = fixture();
        let z = c(0.7, 0.4);
        let t = l.wp_taylor(z, 4).unwrap();
        let h = 1e-4;
        let d2 = (l.wp(z + h).unwrap() - l.wp(z).unwrap() * 2.0 + l.wp(z - h).unwrap()) / (h * h);
        assert!((t[2] * 2.0 - d2).norm() < 1e-6);
    }

    #[test]
    fn minus_root_agrees_with_subtraction() {
        let l = LatticeParams::from_roots(1.5, -0.2, -1.3).unwrap();
        let z = c(0.4, 0.3);
        let w = l.wp(z).unwrap();
        for a in 1..=3u8 {
            let d = l.wp_minus_root(z, a).unwrap();
            assert!((d - (w - l.root(a))).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_wp_real_all_segments() {
        let l = LatticeParams::from_roots(1.5, -0.2, -1.3).unwrap();
        for &t in &[5.0, 1.5, 0.7, -0.2, -0.9, -3.0] {
            let g = l.solve_wp_real(t).unwrap();
            assert!((l.wp(g).unwrap() - t).norm() < 1e-10, "target {t}");
        }
    }

    #[test]
    fn f32_smoke() {
        let l = LatticeParams::<f32>::from_roots(1.0, 0.0, -1.0).unwrap();
        let v = l.wp_edge(0.3, HalfPeriod::Three).unwrap();
        let l64 = fixture();
        let v64 = l64.wp_edge(0.3, HalfPeriod::Three).unwrap();
        assert!((v as f64 - v64).abs() < 1e-5);
    }
}
