use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::scalar::Real;
use crate::sm::NodeMetric;
use crate::tensor::SymTensorField;

/// Symmetrised covariant derivative `d = sigma nabla`, raising the rank by one.
/// Derivatives are taken on the mask and the padding is re-extrapolated.
pub fn sym_derivative<T: Real>(metric: &ConformalMetric<T>, p: &SymTensorField<T>) -> Result<SymTensorField<T>> {
    let grid = p.grid().clone();
    let nm = NodeMetric::sample(metric, &grid);
    let d = |c: usize, axis: usize| grid.derivative(p.component(c), 1, axis);
    let mut out = match p.rank() {
        0 => SymTensorField::new(grid.clone(), 1, vec![d(0, 0), d(0, 1)])?,
        1 => {
            let (d11, d12, d21, d22) = (d(0, 0), d(0, 1), d(1, 0), d(1, 1));
            let (p1, p2) = (p.component(0), p.component(1));
            let half = T::lit(0.5);
            let mut c = vec![vec![T::zero(); grid.len()]; 3];
            for node in grid.inside_nodes() {
                let [l1, l2] = nm.grad[node];
                let (a, b) = (p1[node], p2[node]);
                c[0][node] = d11[node] - l1 * a + l2 * b;
                c[1][node] = half * (d21[node] + d12[node]) - l2 * a - l1 * b;
                c[2][node] = d22[node] + l1 * a - l2 * b;
            }
            SymTensorField::new(grid.clone(), 2, c)?
        }
        r => return Err(Error::UnsupportedRank(r + 1)),
    };
    out.extend_outside();
    Ok(out)
}

/// Divergence `(delta u)_I = g^{jk} nabla_j u_{kI}`, lowering the rank by one.
pub fn divergence<T: Real>(metric: &ConformalMetric<T>, u: &SymTensorField<T>) -> Result<SymTensorField<T>> {
    let grid = u.grid().clone();
    let nm = NodeMetric::sample(metric, &grid);
    let d = |c: usize, axis: usize| grid.derivative(u.component(c), 1, axis);
    let mut out = match u.rank() {
        1 => {
            let (a, b) = (d(0, 0), d(1, 1));
            let mut c = vec![T::zero(); grid.len()];
            for node in grid.inside_nodes() {
                c[node] = (T::lit(-2.0) * nm.lambda[node]).exp() * (a[node] + b[node]);
            }
            SymTensorField::new(grid.clone(), 0, vec![c])?
        }
        2 => {
            let (d11_1, d12_1, d12_2, d22_2) = (d(0, 0), d(1, 0), d(1, 1), d(2, 1));
            let mut c = vec![vec![T::zero(); grid.len()]; 2];
            for node in grid.inside_nodes() {
                let s = (T::lit(-2.0) * nm.lambda[node]).exp();
                let tr = u.component(0)[node] + u.component(2)[node];
                let [l1, l2] = nm.grad[node];
                c[0][node] = s * (d11_1[node] + d12_2[node] - l1 * tr);
                c[1][node] = s * (d12_1[node] + d22_2[node] - l2 * tr);
            }
            SymTensorField::new(grid.clone(), 1, c)?
        }
        r => return Err(Error::UnsupportedRank(r)),
    };
    out.extend_outside();
    Ok(out)
}

/// Normal contraction `u_{I j} nu^j` on the unit circle (where the metric is
/// Euclidean), sampled at `beta_i = 2 pi i / nbeta`. One vector per component.
#[derive(Clone, Debug)]
pub struct BoundaryFlux<T> {
    pub beta: Vec<T>,
    pub values: Vec<Vec<T>>,
}

impl<T: Real> BoundaryFlux<T> {
    /// `int j_nu u dbeta` of a scalar flux by the periodic trapezoid rule.
    pub fn total(&self) -> T {
        let d = T::two_pi() / T::from_usize_lossy(self.beta.len());
        self.values[0].iter().copied().sum::<T>() * d
    }
}

pub fn boundary_flux<T: Real>(u: &SymTensorField<T>, nbeta: usize) -> Result<BoundaryFlux<T>> {
    if u.rank() == 0 {
        return Err(Error::UnsupportedRank(0));
    }
    let grid = u.grid();
    let beta: Vec<T> = (0..nbeta)
        .map(|i| T::two_pi() * T::from_usize_lossy(i) / T::from_usize_lossy(nbeta))
        .collect();
    let mut values = vec![Vec::with_capacity(nbeta); u.rank()];
    for &b in &beta {
        let (s, c) = b.sin_cos();
        let st = grid.interp_stencil(c, s);
        let v: Vec<T> = u.components().iter().map(|comp| grid.apply_interp(&st, comp, 1, 0)).collect();
        if u.rank() == 1 {
            values[0].push(v[0] * c + v[1] * s);
        } else {
            values[0].push(v[0] * c + v[1] * s);
            values[1].push(v[1] * c + v[2] * s);
        }
    }
    Ok(BoundaryFlux { beta, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;
    use std::sync::Arc;

    fn grid() -> Arc<DiskGrid<f64>> {
        Arc::new(DiskGrid::new(33).unwrap())
    }

    #[test]
    fn flat_derivatives_of_polynomials() {
        let m = ConformalMetric::<f64>::euclidean();
        let g = grid();
        let p = SymTensorField::from_fn(g.clone(), 0, |x, y| [1.0 - x * x - y * y, 0.0, 0.0]).unwrap();
        let dp = sym_derivative(&m, &p).unwrap();
        let q = SymTensorField::from_fn(g.clone(), 1, |_, y| [y, 0.0, 0.0]).unwrap();
        let dq = sym_derivative(&m, &q).unwrap();
        let lap = divergence(&m, &dp).unwrap();
        for node in g.inside_nodes() {
            let (x, y) = g.xy(node);
            let v = dp.at(node);
            assert!((v[0] + 2.0 * x).abs() < 1e-12 && (v[1] + 2.0 * y).abs() < 1e-12);
            let w = dq.at(node);
            assert!(w[0].abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12 && w[2].abs() < 1e-12);
            if g.fd_order(node) == 4 {
                assert!((lap.at(node)[0] + 4.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn divergence_free_examples() {
        let m = ConformalMetric::<f64>::euclidean();
        let g = grid();
        let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
        let c = SymTensorField::from_fn(g.clone(), 2, |_, _| [1.0, 0.0, 0.0]).unwrap();
        assert!(divergence(&m, &rot).unwrap().max_abs() < 1e-12);
        assert!(divergence(&m, &c).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn flux_of_tangent_and_constant_fields() {
        let g = grid();
        let rot = SymTensorField::from_fn(g.clone(), 1, |x, y| [-y, x, 0.0]).unwrap();
        let up = SymTensorField::from_fn(g, 1, |_, _| [0.0, 1.0, 0.0]).unwrap();
        let a = boundary_flux(&rot, 64).unwrap();
        let b = boundary_flux(&up, 64).unwrap();
        for i in 0..64 {
            assert!(a.values[0][i].abs() < 1e-12);
            assert!((b.values[0][i] - b.beta[i].sin()).abs() < 1e-12);
        }
    }
}
