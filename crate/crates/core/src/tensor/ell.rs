use crate::error::Result;
use crate::geometry::ConformalMetric;
use crate::scalar::Real;
use crate::sm::{theta_at, validate_ntheta, NodeMetric, SmField};
use crate::tensor::{check_rank, SymTensorField};

/// Contraction with the unit direction: `u_x(xi, ..., xi)` as an SM field.
pub fn ell_m<T: Real>(metric: &ConformalMetric<T>, u: &SymTensorField<T>, nt: usize) -> Result<SmField<T>> {
    validate_ntheta(nt)?;
    let grid = u.grid().clone();
    let nm = NodeMetric::sample(metric, &grid);
    let trig: Vec<(T, T)> = (0..nt).map(|k| theta_at::<T>(k, nt).sin_cos()).collect();
    let two = T::lit(2.0);
    let mut values = Vec::with_capacity(grid.len() * nt);
    for node in 0..grid.len() {
        let v = u.at(node);
        let e = (-nm.lambda[node]).exp();
        for &(s, c) in &trig {
            values.push(match u.rank() {
                0 => v[0],
                1 => e * (v[0] * c + v[1] * s),
                _ => e * e * (v[0] * c * c + two * v[1] * c * s + v[2] * s * s),
            });
        }
    }
    SmField::new(grid, nt, values)
}

/// Fiber integral against `xi^{j1} ... xi^{jm}`, returned with lowered indices.
/// It is the transpose of [`ell_m`] for the SM and tensor inner products.
pub fn l_m<T: Real>(metric: &ConformalMetric<T>, f: &SmField<T>, m: usize) -> Result<SymTensorField<T>> {
    check_rank(m)?;
    let grid = f.grid().clone();
    let nt = f.ntheta();
    let nm = NodeMetric::sample(metric, &grid);
    let dtheta = T::two_pi() / T::from_usize_lossy(nt);
    let trig: Vec<(T, T)> = (0..nt).map(|k| f.theta(k).sin_cos()).collect();
    let mut comps = vec![vec![T::zero(); grid.len()]; m + 1];
    for node in 0..grid.len() {
        let fib = f.fiber(node);
        let e = nm.lambda[node].exp();
        match m {
            0 => comps[0][node] = fib.iter().copied().sum::<T>() * dtheta,
            1 => {
                let (mut a, mut b) = (T::zero(), T::zero());
                for (&v, &(s, c)) in fib.iter().zip(&trig) {
                    a += v * c;
                    b += v * s;
                }
                comps[0][node] = e * a * dtheta;
                comps[1][node] = e * b * dtheta;
            }
            _ => {
                let (mut a, mut b, mut d) = (T::zero(), T::zero(), T::zero());
                for (&v, &(s, c)) in fib.iter().zip(&trig) {
                    a += v * c * c;
                    b += v * c * s;
                    d += v * s * s;
                }
                let s = e * e * dtheta;
                comps[0][node] = s * a;
                comps[1][node] = s * b;
                comps[2][node] = s * d;
            }
        }
    }
    SymTensorField::new(grid, m, comps)
}
