//! Fourth-stage Gauss-Legendre integrator (order 8) for the linear system
//! `psi' = a(t) p`, `p' = c(t) psi`, with step-doubling error control.
//!
//! The method is symplectic, so the monodromy determinant is conserved up to
//! round-off and the linear stage equations are solved exactly.

use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, solve_linear};
use crate::real::{lit, to_f64, Real};

const S: usize = 4;

/// Butcher tableau of the 4-stage Gauss method.
#[derive(Debug, Clone)]
pub struct GaussTableau<T> {
    pub c: [T; S],
    pub a: [[T; S]; S],
    pub b: [T; S],
}

impl<T: Real> GaussTableau<T> {
    pub fn new() -> Self {
        let (x, w) = gauss_legendre::<T>(S);
        let half: T = lit(0.5);
        let mut c = [T::zero(); S];
        let mut b = [T::zero(); S];
        for i in 0..S {
            c[i] = (x[i] + T::one()) * half;
            b[i] = w[i] * half;
        }
        // a_ij = int_0^{c_i} L_j(s) ds, exact with the same rule on [0, c_i]
        let mut a = [[T::zero(); S]; S];
        for i in 0..S {
            for j in 0..S {
                let mut sum = T::zero();
                for (xk, wk) in x.iter().zip(&w) {
                    let s = (*xk + T::one()) * half * c[i];
                    let mut l = T::one();
                    for m in 0..S {
                        if m != j {
                            l = l * (s - c[m]) / (c[j] - c[m]);
                        }
                    }
                    sum = sum + *wk * l;
                }
                a[i][j] = sum * half * c[i];
            }
        }
        Self { c, a, b }
    }
}

impl<T: Real> Default for GaussTableau<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Fundamental matrix `[[psi1, psi2], [p1, p2]]`.
pub type Mat2<T> = [[T; 2]; 2];

/// One Gauss step of size `h` from `t` applied to both columns of `y`.
fn step<T: Real, F>(tab: &GaussTableau<T>, coef: &F, t: T, h: T, y: &Mat2<T>) -> Result<Mat2<T>>
where
    F: Fn(T) -> Result<(T, T)>,
{
    let mut ac = [(T::zero(), T::zero()); S];
    for i in 0..S {
        ac[i] = coef(t + tab.c[i] * h)?;
    }
    // unknowns: k_psi[0..S], k_p[0..S]
    let n = 2 * S;
    let mut m = vec![vec![T::zero(); n]; n];
    for i in 0..S {
        let (a, c) = ac[i];
        m[i][i] = T::one();
        m[S + i][S + i] = T::one();
        for j in 0..S {
            m[i][S + j] = -a * h * tab.a[i][j];
            m[S + i][j] = -c * h * tab.a[i][j];
        }
    }
    let mut out = *y;
    for col in 0..2 {
        let (psi, p) = (y[0][col], y[1][col]);
        let mut rhs = vec![T::zero(); n];
        for i in 0..S {
            rhs[i] = ac[i].0 * p;
            rhs[S + i] = ac[i].1 * psi;
        }
        let k = solve_linear(m.clone(), rhs, T::epsilon())?;
        let mut dpsi = T::zero();
        let mut dp = T::zero();
        for i in 0..S {
            dpsi = dpsi + tab.b[i] * k[i];
            dp = dp + tab.b[i] * k[S + i];
        }
        out[0][col] = psi + h * dpsi;
        out[1][col] = p + h * dp;
    }
    Ok(out)
}

/// Transfer matrix over `[0, period]` of `psi' = a p`, `p' = c psi`, where
/// `coef(t) = (a(t), c(t))`.
pub fn transfer_matrix<T: Real, F>(coef: F, period: T, local_tol: T) -> Result<Mat2<T>>
where
    F: Fn(T) -> Result<(T, T)>,
{
    let tab = GaussTableau::<T>::new();
    let mut y: Mat2<T> = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let mut t = T::zero();
    let mut h = period / lit(16.0);
    let h_min = period * lit(1e-13);
    let half: T = lit(0.5);
    let inv_order: T = lit(1.0 / 9.0);
    while t < period {
        if t + h > period {
            h = period - t;
        }
        let big = step(&tab, &coef, t, h, &y)?;
        let mid = step(&tab, &coef, t, h * half, &y)?;
        let small = step(&tab, &coef, t + h * half, h * half, &mid)?;
        let mut err = T::zero();
        let mut mag = T::one();
        for r in 0..2 {
            for c in 0..2 {
                err = err.max((small[r][c] - big[r][c]).abs());
                mag = mag.max(small[r][c].abs());
            }
        }
        let err = err / mag;
        if err <= local_tol || h <= h_min {
            if h <= h_min && err > local_tol {
                return Err(Error::IntegrationFailure { t: to_f64(t) });
            }
            y = small;
            t = t + h;
            let grow = if err == T::zero() {
                lit(3.0)
            } else {
                (lit::<T>(0.9) * (local_tol / err).powf(inv_order)).min(lit(3.0))
            };
            h = h * grow.max(lit(0.2));
        } else {
            let shrink = (lit::<T>(0.9) * (local_tol / err).powf(inv_order)).max(lit(0.1));
            h = (h * shrink.min(lit(0.9))).max(h_min);
        }
        if !h.is_finite() {
            return Err(Error::IntegrationFailure { t: to_f64(t) });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_is_consistent() {
        let tab = GaussTableau::<f64>::new();
        let bsum: f64 = tab.b.iter().sum();
        assert!((bsum - 1.0).abs() < 1e-15);
        for i in 0..S {
            let row: f64 = tab.a[i].iter().sum();
            assert!((row - tab.c[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        // psi'' = -w^2 psi over one period 1
        let w = 2.0 * std::f64::consts::PI * 1.5;
        let m = transfer_matrix(|_t| Ok((1.0, -w * w)), 1.0, 1e-12).unwrap();
        assert!((m[0][0] - (w).cos()).abs() < 1e-10);
        assert!((m[0][1] - (w).sin() / w).abs() < 1e-10);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).abs() < 1e-12);
    }
}
