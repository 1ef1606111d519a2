use crate::error::Result;
use crate::geometry::ConformalMetric;
use crate::grid::DiskGrid;
use crate::scalar::{FieldElem, Real};
use crate::sm::SmField;
use crate::transform::{inner_product_mu, FanBeamData, RayTransform};

/// Per-node Liouville weight `w_area * exp(2 lambda) * dtheta`.
pub fn liouville_weights<T: Real>(metric: &ConformalMetric<T>, grid: &DiskGrid<T>, nt: usize) -> Vec<T> {
    let dtheta = T::two_pi() / T::from_usize_lossy(nt);
    (0..grid.len())
        .map(|node| {
            let w = grid.weights()[node];
            if w == T::zero() {
                return T::zero();
            }
            let (x1, x2) = grid.xy(node);
            w * (T::lit(2.0) * metric.lambda(x1, x2)).exp() * dtheta
        })
        .collect()
}

/// `<f, g> = int_SM f conj(g) dSigma`.
pub fn inner_product_sm<T: Real, E: FieldElem<T>>(
    metric: &ConformalMetric<T>,
    f: &SmField<T, E>,
    g: &SmField<T, E>,
) -> Result<E> {
    inner_product_sm_on(metric, f, g, None)
}

/// Inner product restricted to the nodes where `select` is true.
pub fn inner_product_sm_on<T: Real, E: FieldElem<T>>(
    metric: &ConformalMetric<T>,
    f: &SmField<T, E>,
    g: &SmField<T, E>,
    select: Option<&[bool]>,
) -> Result<E> {
    f.check_layout(g)?;
    let grid = f.grid();
    let w = liouville_weights(metric, grid, f.ntheta());
    let mut total = E::zero();
    for node in grid.inside_nodes() {
        if let Some(sel) = select {
            if !sel[node] {
                continue;
            }
        }
        let mut acc = E::zero();
        for (&a, &b) in f.fiber(node).iter().zip(g.fiber(node)) {
            acc += a.mul_conj(b);
        }
        total += acc * w[node];
    }
    Ok(total)
}

pub fn norm_sm<T: Real, E: FieldElem<T>>(metric: &ConformalMetric<T>, f: &SmField<T, E>) -> T {
    norm_sm_on(metric, f, None)
}

pub fn norm_sm_on<T: Real, E: FieldElem<T>>(metric: &ConformalMetric<T>, f: &SmField<T, E>, select: Option<&[bool]>) -> T {
    let grid = f.grid();
    let w = liouville_weights(metric, grid, f.ntheta());
    let mut total = T::zero();
    for node in grid.inside_nodes() {
        if select.is_some_and(|s| !s[node]) {
            continue;
        }
        let acc: T = f.fiber(node).iter().map(|v| v.norm_sqr()).sum();
        total += acc * w[node];
    }
    total.sqrt()
}

/// Both sides of Santalo's formula for `f`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SantaloReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// `int_SM f dSigma` against `int_{inflow} (I f) d mu`.
pub fn santalo_check<T: Real>(transform: &RayTransform<T>, f: &SmField<T>) -> Result<SantaloReport> {
    let metric = transform.metric();
    let one = SmField::from_parts_unchecked(f.grid().clone(), f.ntheta(), vec![T::one(); f.values().len()]);
    let lhs = inner_product_sm(metric, f, &one)?.as_f64();
    let data = transform.forward_i(f)?;
    let ones = FanBeamData::from_fn(data.grid, |_, _| T::one());
    let rhs = inner_product_mu(&data, &ones)?.as_f64();
    let scale = lhs.abs().max(rhs.abs());
    let rel_err = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(SantaloReport { lhs, rhs, rel_err })
}
