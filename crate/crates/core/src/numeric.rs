//! Small numerical utilities: dense solves, Gauss-Legendre rules, bracketing.

use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// `a` is row-major `n x n`. A pivot below `pivot_tol * max|a|` is singular.
pub fn solve_linear<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, pivot_tol: T) -> Result<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= pivot_tol * scale || !pmax.is_finite() {
            return Err(Error::SingularSystem { pivot: to_f64(pmax) });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] = a[r][c] - f * v;
            }
            let v = b[col];
            b[r] = b[r] - f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s = s - a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Ok(x)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf: T = lit(n as f64);
    for i in 0..(n + 1) / 2 {
        let mut x: T = (T::PI() * (lit::<T>(i as f64) + lit(0.75)) / (nf + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf: T = lit(k as f64);
        let p2 = ((lit::<T>(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf: T = lit(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Composite Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn integrate<T: Real, F>(f: F, a: T, b: T, panels: usize, rule: &(Vec<T>, Vec<T>)) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let h = (b - a) / lit(panels as f64);
    let half = h / lit(2.0);
    let mut sum = T::zero();
    for p in 0..panels {
        let mid = a + h * lit(p as f64) + half;
        for (x, w) in rule.0.iter().zip(rule.1.iter()) {
            sum = sum + *w * f(mid + half * *x)?;
        }
    }
    Ok(sum * half)
}

/// Bisection on a sign change of `f` in `[lo, hi]` down to width `tol`.
pub fn bisect<T: Real, F>(f: F, mut lo: T, mut hi: T, tol: T) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let mut flo = f(lo)?;
    if flo == T::zero() {
        return Ok(lo);
    }
    for _ in 0..400 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = (lo + hi) / lit(2.0);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / lit(2.0))
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_section<T: Real, F>(f: F, mut a: T, mut b: T, tol: T) -> Result<(T, T)>
where
    F: Fn(T) -> Result<T>,
{
    let inv_phi: T = lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d)?;
        }
    }
    let x = (a + b) / lit(2.0);
    Ok((x, f(x)?))
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, rms residual)`.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n: T = lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |s, &v| s + v) / n;
    let my = ys.iter().fold(T::zero(), |s, &v| s + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss = xs
        .iter()
        .zip(ys)
        .fold(T::zero(), |s, (&x, &y)| s + (y - slope * x - icpt).powi(2));
    (slope, icpt, (ss / n).sqrt())
}

/// Median of a non-empty slice.
pub fn median<T: Real>(values: &[T]) -> T {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / lit(2.0)
    }
}

/// Five-point central difference with one Richardson extrapolation step.
pub fn richardson_derivative<T: Real, F>(f: F, x: T, h: T) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let d = |h: T| -> Result<T> {
        let two: T = lit(2.0);
        Ok((f(x - two * h)? - lit::<T>(8.0) * f(x - h)? + lit::<T>(8.0) * f(x + h)? - f(x + two * h)?)
            / (lit::<T>(12.0) * h))
    };
    let d1 = d(h)?;
    let d2 = d(h / lit(2.0))?;
    Ok(d2 + (d2 - d1) / lit(15.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre::<f64>(6);
        let w: f64 = rule.1.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        // degree 11 is exact for 6 nodes
        let v = integrate(|x: f64| Ok(x.powi(10) + x.powi(3)), 0.0, 1.0, 1, &rule).unwrap();
        assert!((v - 1.0 / 11.0 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn dense_solve_and_singular() {
        let a: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_linear(a, vec![3.0, 5.0], 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let s = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(
            solve_linear(s, vec![1.0, 2.0], 1e-12),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn bracketing_helpers() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-13).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let (m, _) = golden_section(|x: f64| Ok((x - 0.3).powi(2)), -1.0, 1.0, 1e-9).unwrap();
        assert!((m - 0.3).abs() < 1e-8);
        let d = richardson_derivative(|x: f64| Ok(x.sin()), 0.5, 1e-2).unwrap();
        assert!((d - 0.5f64.cos()).abs() < 1e-12);
        let (s, c, res) = fit_line::<f64>(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && res < 1e-14);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }
}
