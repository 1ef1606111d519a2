//! One-dimensional quadrature rules.

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrates `f` over `[a, b]` with an `n`-point Gauss–Legendre rule.
pub fn integrate<T: Real>(a: T, b: T, n: usize, mut f: impl FnMut(T) -> T) -> T {
    let (x, w) = gauss_legendre(n);
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| T::lit(wi) * f(mid + half * T::lit(xi)))
        .sum::<T>()
        * half
}

/// Composite trapezoid weights for samples at `t` (strictly increasing).
pub fn trapezoid_weights<T: Real>(t: &[T]) -> Vec<T> {
    let n = t.len();
    let mut w = vec![T::zero(); n];
    if n < 2 {
        return w;
    }
    let half = T::lit(0.5);
    for k in 0..n - 1 {
        let dt = (t[k + 1] - t[k]) * half;
        w[k] += dt;
        w[k + 1] += dt;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2usize, 5, 12, 32] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let t = [0.0, 0.1, 0.25, 0.7, 1.0];
        let w = trapezoid_weights(&t);
        let s: f64 = t.iter().zip(&w).map(|(t, w)| w * (3.0 * t + 1.0)).sum();
        assert!((s - 2.5).abs() < 1e-14);
    }
}
