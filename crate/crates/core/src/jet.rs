//! Truncated Taylor series in one real variable.
//!
//! A [`Jet`] stores `f(y0 + h) = sum_k c[k] h^k` up to a fixed maximal order.
//! Arithmetic propagates exact derivatives, which is how every density and
//! potential in this crate gets its y-derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Number of stored coefficients (orders 0 through 8).
pub const JET_LEN: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    c: [T; JET_LEN],
    /// Number of trustworthy coefficients.
    len: usize,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); JET_LEN];
        c[0] = v;
        Self { c, len: JET_LEN }
    }

    /// The identity map `y` expanded at `y0`.
    pub fn variable(y0: T) -> Self {
        let mut j = Self::constant(y0);
        j.c[1] = T::one();
        j
    }

    /// Builds a jet from Taylor coefficients; missing orders are untrusted.
    pub fn from_coeffs(coeffs: &[T]) -> Self {
        let len = coeffs.len().min(JET_LEN);
        let mut c = [T::zero(); JET_LEN];
        c[..len].copy_from_slice(&coeffs[..len]);
        Self { c, len }
    }

    /// Builds a jet from derivative values `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[T]) -> Self {
        let mut fact = T::one();
        let coeffs: Vec<T> = derivs
            .iter()
            .take(JET_LEN)
            .enumerate()
            .map(|(k, &d)| {
                if k > 0 {
                    fact = fact * lit(k as f64);
                }
                d / fact
            })
            .collect();
        Self::from_coeffs(&coeffs)
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c[..self.len]
    }

    /// Highest derivative order that is available.
    pub fn order(&self) -> usize {
        self.len - 1
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> Result<T> {
        if k >= self.len {
            return Err(Error::MissingDerivative {
                needed: k,
                available: self.order(),
            });
        }
        let mut f = T::one();
        for i in 2..=k {
            f = f * lit(i as f64);
        }
        Ok(self.c[k] * f)
    }

    /// Jet of `f'`; loses one order.
    pub fn differentiate(&self) -> Self {
        let mut c = [T::zero(); JET_LEN];
        for k in 1..self.len {
            c[k - 1] = self.c[k] * lit(k as f64);
        }
        Self {
            c,
            len: self.len.saturating_sub(1).max(1),
        }
    }

    /// Replaces the value coefficient, e.g. with a more accurate evaluation.
    pub fn with_value(mut self, v: T) -> Self {
        self.c[0] = v;
        self
    }

    pub fn truncate(mut self, len: usize) -> Self {
        self.len = self.len.min(len.max(1));
        self
    }

    pub fn scale(mut self, s: T) -> Self {
        for v in self.c.iter_mut() {
            *v = *v * s;
        }
        self
    }

    pub fn recip(&self) -> Self {
        Self::constant(T::one()) / *self
    }

    /// Composition `f(self)` given `f, f', f'', ...` at `self.value()`.
    pub fn compose(&self, derivs: &[T]) -> Self {
        let mut h = *self;
        h.c[0] = T::zero();
        let mut out = Self::constant(T::zero());
        out.len = self.len;
        let mut power = Self::constant(T::one());
        let mut fact = T::one();
        for (k, &d) in derivs.iter().enumerate().take(self.len) {
            if k > 0 {
                power = power * h;
                fact = fact * lit(k as f64);
            }
            let w = d / fact;
            for i in 0..self.len {
                out.c[i] = out.c[i] + w * power.c[i];
            }
        }
        out
    }

    /// `self^p` for real `p`; requires a positive value unless `p` is an integer.
    pub fn powf(&self, p: T) -> Self {
        let x0 = self.value();
        let mut derivs = Vec::with_capacity(self.len);
        let mut coef = T::one();
        for k in 0..self.len {
            let kk: T = lit(k as f64);
            derivs.push(coef * x0.powf(p - kk));
            coef = coef * (p - kk);
        }
        self.compose(&derivs)
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::constant(T::one()).truncate(self.len),
            n if n > 0 => {
                let mut out = *self;
                for _ in 1..n {
                    out = out * *self;
                }
                out
            }
            n => self.powi(-n).recip(),
        }
    }

    pub fn sqrt(&self) -> Self {
        self.powf(lit(0.5))
    }

    pub fn ln(&self) -> Self {
        let x0 = self.value();
        let mut derivs = Vec::with_capacity(self.len);
        derivs.push(x0.ln());
        let mut f = T::one();
        for k in 1..self.len {
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            derivs.push(sign * f / x0.powi(k as i32));
            f = f * lit(k as f64);
        }
        self.compose(&derivs)
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.len])
    }

    pub fn tanh(&self) -> Self {
        // tanh g = 1 - 2 / (exp(2g) + 1)
        let e2 = (self.scale(lit(2.0))).exp();
        let one = Self::constant(T::one());
        one - (e2 + one).recip().scale(lit(2.0))
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for k in 0..JET_LEN {
            self.c[k] = self.c[k] + rhs.c[k];
        }
        self.len = self.len.min(rhs.len);
        self
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for k in 0..JET_LEN {
            self.c[k] = self.c[k] - rhs.c[k];
        }
        self.len = self.len.min(rhs.len);
        self
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let len = self.len.min(rhs.len);
        let mut c = [T::zero(); JET_LEN];
        for (i, ci) in c.iter_mut().enumerate().take(len) {
            let mut s = T::zero();
            for j in 0..=i {
                s = s + self.c[j] * rhs.c[i - j];
            }
            *ci = s;
        }
        Self { c, len }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let len = self.len.min(rhs.len);
        let mut c = [T::zero(); JET_LEN];
        let d0 = rhs.c[0];
        for i in 0..len {
            let mut s = self.c[i];
            for j in 1..=i {
                s = s - rhs.c[j] * c[i - j];
            }
            c[i] = s / d0;
        }
        Self { c, len }
    }
}

impl<T: Real> Add<T> for Jet<T> {
    type Output = Self;
    fn add(mut self, rhs: T) -> Self {
        self.c[0] = self.c[0] + rhs;
        self
    }
}

impl<T: Real> Sub<T> for Jet<T> {
    type Output = Self;
    fn sub(mut self, rhs: T) -> Self {
        self.c[0] = self.c[0] - rhs;
        self
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}
