use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::grid::DiskGrid;
use crate::scalar::{FieldElem, Real};

/// `nt` must be a power of two of at least 64.
pub fn validate_ntheta(nt: usize) -> Result<()> {
    if nt < 64 || !nt.is_power_of_two() {
        return Err(Error::InvalidParams(format!(
            "ntheta = {nt} must be a power of two >= 64"
        )));
    }
    Ok(())
}

/// Samples of a function on the sphere bundle: every grid node carries `nt`
/// equispaced fiber angles `theta_k = 2 pi k / nt`, stored node-major.
#[derive(Clone, Debug)]
pub struct SmField<T, E = T> {
    grid: Arc<DiskGrid<T>>,
    nt: usize,
    values: Vec<E>,
}

pub type ComplexSmField<T> = SmField<T, Complex<T>>;

impl<T: Real, E: FieldElem<T>> SmField<T, E> {
    pub fn new(grid: Arc<DiskGrid<T>>, nt: usize, values: Vec<E>) -> Result<Self> {
        validate_ntheta(nt)?;
        if values.len() != grid.len() * nt {
            return Err(Error::GridMismatch);
        }
        Ok(SmField { grid, nt, values })
    }

    pub fn zeros(grid: Arc<DiskGrid<T>>, nt: usize) -> Result<Self> {
        let len = grid.len() * nt;
        Self::new(grid, nt, vec![E::zero(); len])
    }

    /// Samples `f(x1, x2, theta)` at every node, including the padding.
    pub fn from_fn(grid: Arc<DiskGrid<T>>, nt: usize, f: impl Fn(T, T, T) -> E) -> Result<Self> {
        validate_ntheta(nt)?;
        let mut values = Vec::with_capacity(grid.len() * nt);
        for node in 0..grid.len() {
            let (x1, x2) = grid.xy(node);
            for k in 0..nt {
                values.push(f(x1, x2, theta_at::<T>(k, nt)));
            }
        }
        Self::new(grid, nt, values)
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<DiskGrid<T>>, nt: usize, values: Vec<E>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * nt);
        SmField { grid, nt, values }
    }

    pub fn grid(&self) -> &Arc<DiskGrid<T>> {
        &self.grid
    }

    pub fn ntheta(&self) -> usize {
        self.nt
    }

    pub fn theta(&self, k: usize) -> T {
        theta_at(k, self.nt)
    }

    pub fn values(&self) -> &[E] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [E] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<E> {
        self.values
    }

    #[inline]
    pub fn at(&self, node: usize, k: usize) -> E {
        self.values[node * self.nt + k]
    }

    pub fn fiber(&self, node: usize) -> &[E] {
        &self.values[node * self.nt..(node + 1) * self.nt]
    }

    /// Same grid (by identity or size) and same fiber resolution.
    pub fn same_layout<F: FieldElem<T>>(&self, other: &SmField<T, F>) -> bool {
        self.nt == other.nt && (Arc::ptr_eq(&self.grid, &other.grid) || self.grid.nx() == other.grid.nx())
    }

    pub fn check_layout<F: FieldElem<T>>(&self, other: &SmField<T, F>) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map<F: FieldElem<T>>(&self, f: impl Fn(E) -> F) -> SmField<T, F> {
        SmField {
            grid: self.grid.clone(),
            nt: self.nt,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexSmField<T> {
        self.map(|v| v.to_complex())
    }

    pub fn scale(&self, a: T) -> Self {
        self.map(|v| v * a)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        Ok(SmField {
            grid: self.grid.clone(),
            nt: self.nt,
            values: self.values.iter().zip(&other.values).map(|(&u, &v)| u + v * a).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    /// Largest magnitude over masked nodes.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for node in self.grid.inside_nodes() {
            for v in self.fiber(node) {
                m = m.max(v.norm_sqr().sqrt());
            }
        }
        m
    }

    /// Recomputes the padding values from the masked ones.
    pub fn extend_outside(&mut self) {
        self.grid.extend_outside(&mut self.values, self.nt);
    }
}

impl<T: Real> ComplexSmField<T> {
    pub fn re(&self) -> SmField<T> {
        self.map(|c| c.re)
    }

    pub fn im(&self) -> SmField<T> {
        self.map(|c| c.im)
    }
}

#[inline]
pub(crate) fn theta_at<T: Real>(k: usize, nt: usize) -> T {
    T::two_pi() * T::from_usize_lossy(k) / T::from_usize_lossy(nt)
}

/// Conformal factor and its gradient sampled at every grid node.
#[derive(Clone, Debug)]
pub struct NodeMetric<T> {
    pub lambda: Vec<T>,
    pub grad: Vec<[T; 2]>,
}

impl<T: Real> NodeMetric<T> {
    pub fn sample(metric: &ConformalMetric<T>, grid: &DiskGrid<T>) -> Self {
        let (mut lambda, mut grad) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
        for node in 0..grid.len() {
            let (x1, x2) = grid.xy(node);
            let (l, g) = metric.lambda_grad(x1, x2);
            lambda.push(l);
            grad.push(g);
        }
        NodeMetric { lambda, grad }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_fiber_resolution() {
        assert!(validate_ntheta(50).is_err());
        assert!(validate_ntheta(32).is_err());
        assert!(validate_ntheta(64).is_ok());
        let g = Arc::new(DiskGrid::<f64>::new(17).unwrap());
        assert!(SmField::<f64>::zeros(g.clone(), 96).is_err());
        assert!(SmField::<f64>::new(g, 64, vec![0.0; 3]).is_err());
    }

    #[test]
    fn samples_follow_theta_grid() {
        let g = Arc::new(DiskGrid::<f64>::new(17).unwrap());
        let f = SmField::from_fn(g.clone(), 64, |x, _, th| x + th).unwrap();
        let node = g.index(10, 7);
        let (x, _) = g.xy(node);
        assert!((f.at(node, 16) - (x + std::f64::consts::FRAC_PI_2)).abs() < 1e-14);
    }
}
