use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{inflow_coordinates, ConformalMetric, PhasePoint, TraceOptions};
use crate::scalar::{wrap_angle, Real};
use crate::sm::SmField;
use crate::tensor::{l_m, SymTensorField};
use crate::transform::{FanIndex, FanBeamData, RayTransform};

/// Inflow fan-beam location of every `(node, theta_k)` of the SM grid.
pub(crate) struct BackPlan<T> {
    index: Vec<FanIndex<T>>,
    grazing: Vec<bool>,
}

/// Inflow coordinates of the straight line through `(x1, x2)` (outside the
/// unit disk) in direction `theta`: where the line enters the disk, or the
/// tangential point nearest to it when the line misses.
fn line_inflow<T: Real>(x1: T, x2: T, theta: T) -> (T, T) {
    let (s, c) = theta.sin_cos();
    let b = x1 * c + x2 * s;
    let disc = b * b - (x1 * x1 + x2 * x2 - T::one());
    let (y1, y2) = if disc >= T::zero() {
        let t = -b - disc.sqrt();
        (x1 + t * c, x2 + t * s)
    } else {
        (x1 - b * c, x2 - b * s)
    };
    let beta = y2.atan2(y1);
    let alpha = wrap_angle(theta - beta - T::PI()).max(-T::FRAC_PI_2()).min(T::FRAC_PI_2());
    (beta, alpha)
}

impl<T: Real> RayTransform<T> {
    pub(crate) fn plan(&self) -> Result<&BackPlan<T>> {
        self.back
            .get_or_init(|| {
                let nt = self.nt;
                let rows: Vec<Result<Vec<(FanIndex<T>, bool)>>> = (0..self.grid.len())
                    .into_par_iter()
                    .map(|node| {
                        let (x1, x2) = self.grid.xy(node);
                        let inside = self.grid.is_inside(node);
                        (0..nt)
                            .map(|k| {
                                let theta = T::two_pi() * T::from_usize_lossy(k) / T::from_usize_lossy(nt);
                                let (beta, alpha) = if inside {
                                    let (bc, _) =
                                        inflow_coordinates(&self.metric, PhasePoint::new(x1, x2, theta), self.opts)?;
                                    (bc.beta, bc.alpha)
                                } else {
                                    line_inflow(x1, x2, theta)
                                };
                                Ok((self.fan.locate(beta, alpha), self.fan.is_grazing(alpha)))
                            })
                            .collect()
                    })
                    .collect();
                let mut index = Vec::with_capacity(self.grid.len() * nt);
                let mut grazing = Vec::with_capacity(self.grid.len() * nt);
                for row in rows {
                    for (ix, g) in row? {
                        index.push(ix);
                        grazing.push(g);
                    }
                }
                Ok(BackPlan { index, grazing })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `I* phi = phi#`: the value of `phi` at the inflow point of the orbit
    /// through each `(node, theta)`, interpolated in `(beta, alpha)`.
    pub fn backproject(&self, phi: &FanBeamData<T>) -> Result<SmField<T>> {
        if phi.grid != self.fan {
            return Err(Error::GridMismatch);
        }
        let plan = self.plan()?;
        let values = plan.index.iter().map(|ix| phi.eval(ix, self.interp)).collect();
        SmField::new(self.grid.clone(), self.nt, values)
    }

    /// `I_m* phi = L_m(phi#)`.
    pub fn adjoint_im(&self, phi: &FanBeamData<T>, m: usize) -> Result<SymTensorField<T>> {
        l_m(&self.metric, &self.backproject(phi)?, m)
    }

    /// `N u = I_m* I_m u`.
    pub fn normal(&self, u: &SymTensorField<T>) -> Result<SymTensorField<T>> {
        self.adjoint_im(&self.forward_im(u)?, u.rank())
    }

    /// Per `(node, theta_k)`: the orbit enters within two alpha cells of tangency.
    pub fn grazing_mask(&self) -> Result<&[bool]> {
        Ok(&self.plan()?.grazing)
    }
}

/// One-shot `I* phi` on the given SM grid.
pub fn backproject_istar<T: Real>(
    metric: &ConformalMetric<T>,
    phi: &FanBeamData<T>,
    grid: std::sync::Arc<crate::grid::DiskGrid<T>>,
    nt: usize,
    opts: TraceOptions<T>,
) -> Result<SmField<T>> {
    RayTransform::new(*metric, grid, nt, phi.grid, opts)?.backproject(phi)
}

/// One-shot `I_m* phi`.
pub fn adjoint_im_star<T: Real>(
    metric: &ConformalMetric<T>,
    phi: &FanBeamData<T>,
    m: usize,
    grid: std::sync::Arc<crate::grid::DiskGrid<T>>,
    nt: usize,
    opts: TraceOptions<T>,
) -> Result<SymTensorField<T>> {
    RayTransform::new(*metric, grid, nt, phi.grid, opts)?.adjoint_im(phi, m)
}

