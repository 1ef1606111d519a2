use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ConformalMetric;
use crate::grid::DiskGrid;
use crate::scalar::Real;

/// Number of independent components of a symmetric rank-`m` tensor in 2D.
pub fn component_count(rank: usize) -> usize {
    rank + 1
}

/// How often each stored component appears in the full index tensor.
pub fn multiplicities(rank: usize) -> &'static [usize] {
    match rank {
        0 => &[1],
        1 => &[1, 1],
        _ => &[1, 2, 1],
    }
}

pub(crate) fn check_rank(rank: usize) -> Result<()> {
    if rank > 2 {
        Err(Error::UnsupportedRank(rank))
    } else {
        Ok(())
    }
}

/// Covariant components on the disk grid: `[u]`, `[u_1, u_2]` or
/// `[u_11, u_12, u_22]`, each a nodal array including padding values.
#[derive(Clone, Debug)]
pub struct SymTensorField<T> {
    grid: Arc<DiskGrid<T>>,
    rank: usize,
    comps: Vec<Vec<T>>,
}

impl<T: Real> SymTensorField<T> {
    pub fn new(grid: Arc<DiskGrid<T>>, rank: usize, comps: Vec<Vec<T>>) -> Result<Self> {
        check_rank(rank)?;
        if comps.len() != component_count(rank) || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(SymTensorField { grid, rank, comps })
    }

    pub fn zeros(grid: Arc<DiskGrid<T>>, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let comps = vec![vec![T::zero(); grid.len()]; component_count(rank)];
        Ok(SymTensorField { grid, rank, comps })
    }

    /// Samples `f(x1, x2)`, using the first `rank + 1` entries.
    pub fn from_fn(grid: Arc<DiskGrid<T>>, rank: usize, f: impl Fn(T, T) -> [T; 3]) -> Result<Self> {
        check_rank(rank)?;
        let nc = component_count(rank);
        let mut comps = vec![Vec::with_capacity(grid.len()); nc];
        for node in 0..grid.len() {
            let (x1, x2) = grid.xy(node);
            let v = f(x1, x2);
            for (c, comp) in comps.iter_mut().enumerate() {
                comp.push(v[c]);
            }
        }
        Ok(SymTensorField { grid, rank, comps })
    }

    pub fn grid(&self) -> &Arc<DiskGrid<T>> {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Vec<T>] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<T>] {
        &mut self.comps
    }

    pub fn component(&self, c: usize) -> &[T] {
        &self.comps[c]
    }

    pub fn at(&self, node: usize) -> [T; 3] {
        let mut v = [T::zero(); 3];
        for (c, comp) in self.comps.iter().enumerate() {
            v[c] = comp[node];
        }
        v
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.rank == other.rank && (Arc::ptr_eq(&self.grid, &other.grid) || self.grid.nx() == other.grid.nx())
    }

    pub fn check_layout(&self, other: &Self) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_layout(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(SymTensorField { grid: self.grid.clone(), rank: self.rank, comps })
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + a * y)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, a: T) -> Self {
        let comps = self.comps.iter().map(|c| c.iter().map(|&x| a * x).collect()).collect();
        SymTensorField { grid: self.grid.clone(), rank: self.rank, comps }
    }

    /// Multiplies every component by a scalar nodal array.
    pub fn mul_nodal(&self, s: &[T]) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(s).map(|(&x, &y)| x * y).collect())
            .collect();
        SymTensorField { grid: self.grid.clone(), rank: self.rank, comps }
    }

    /// Largest component magnitude over masked nodes.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for node in self.grid.inside_nodes() {
            for c in &self.comps {
                m = m.max(c[node].abs());
            }
        }
        m
    }

    /// Largest pointwise `g`-norm over masked nodes.
    pub fn sup_norm(&self, metric: &ConformalMetric<T>) -> T {
        let mult = multiplicities(self.rank);
        let mut m = T::zero();
        for node in self.grid.inside_nodes() {
            let (x1, x2) = self.grid.xy(node);
            let s = (-T::from_usize_lossy(2 * self.rank) * metric.lambda(x1, x2)).exp();
            let v: T = self
                .comps
                .iter()
                .zip(mult)
                .map(|(c, &k)| T::from_usize_lossy(k) * c[node] * c[node])
                .sum();
            m = m.max((v * s).sqrt());
        }
        m
    }

    pub fn extend_outside(&mut self) {
        for c in self.comps.iter_mut() {
            self.grid.extend_outside(c, 1);
        }
    }

    /// Trace `g^ij u_ij` of a rank-2 field (times `exp(2 lambda)`): `u_11 + u_22`.
    pub fn euclidean_trace(&self) -> Result<Vec<T>> {
        if self.rank != 2 {
            return Err(Error::UnsupportedRank(self.rank));
        }
        Ok(self.comps[0].iter().zip(&self.comps[2]).map(|(&a, &b)| a + b).collect())
    }
}

/// Per-node weight `w_area * exp(2 lambda) * exp(-2 m lambda)` of the tensor inner product.
pub fn tensor_weights<T: Real>(metric: &ConformalMetric<T>, grid: &DiskGrid<T>, rank: usize) -> Vec<T> {
    let p = T::from_usize_lossy(2) - T::from_usize_lossy(2 * rank);
    (0..grid.len())
        .map(|node| {
            let w = grid.weights()[node];
            if w == T::zero() {
                return T::zero();
            }
            let (x1, x2) = grid.xy(node);
            w * (p * metric.lambda(x1, x2)).exp()
        })
        .collect()
}

/// `(u, v) = int_M u_I v^I dV`.
pub fn inner_product_tensor<T: Real>(
    metric: &ConformalMetric<T>,
    u: &SymTensorField<T>,
    v: &SymTensorField<T>,
) -> Result<T> {
    inner_product_tensor_on(metric, u, v, None)
}

pub fn inner_product_tensor_on<T: Real>(
    metric: &ConformalMetric<T>,
    u: &SymTensorField<T>,
    v: &SymTensorField<T>,
    select: Option<&[bool]>,
) -> Result<T> {
    u.check_layout(v)?;
    let w = tensor_weights(metric, u.grid(), u.rank());
    Ok(weighted_dot(&w, multiplicities(u.rank()), u, v, select))
}

pub(crate) fn weighted_dot<T: Real>(
    w: &[T],
    mult: &[usize],
    u: &SymTensorField<T>,
    v: &SymTensorField<T>,
    select: Option<&[bool]>,
) -> T {
    let mut total = T::zero();
    for node in u.grid().inside_nodes() {
        if select.is_some_and(|s| !s[node]) {
            continue;
        }
        let mut acc = T::zero();
        for ((a, b), &k) in u.components().iter().zip(v.components()).zip(mult) {
            acc += T::from_usize_lossy(k) * a[node] * b[node];
        }
        total += w[node] * acc;
    }
    total
}

pub fn norm_tensor<T: Real>(metric: &ConformalMetric<T>, u: &SymTensorField<T>) -> T {
    inner_product_tensor(metric, u, u).map(|v| v.max(T::zero()).sqrt()).unwrap_or(T::zero())
}

pub fn norm_tensor_on<T: Real>(metric: &ConformalMetric<T>, u: &SymTensorField<T>, select: Option<&[bool]>) -> T {
    inner_product_tensor_on(metric, u, u, select)
        .map(|v| v.max(T::zero()).sqrt())
        .unwrap_or(T::zero())
}
