use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{ConformalMetric, PhasePoint, TraceOptions, Tracer};
use crate::grid::DiskGrid;
use crate::quadrature::trapezoid_weights;
use crate::scalar::Real;
use crate::sm::validate_ntheta;
use crate::transform::backproject::BackPlan;
use crate::transform::{FanBeamGrid, FanInterp};

/// A quadrature node along a ray: position, direction angle and trapezoid weight.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RaySample<T> {
    pub x1: T,
    pub x2: T,
    pub theta: T,
    pub w: T,
}

/// Ray samples of every fan-beam node, stored contiguously.
pub(crate) struct RayCache<T> {
    offsets: Vec<usize>,
    samples: Vec<RaySample<T>>,
}

/// Upper bound on the memory spent caching ray samples.
const CACHE_BUDGET_BYTES: usize = 512 << 20;

/// Discretised ray transform for one metric, disk grid, fiber resolution and
/// fan-beam grid. Ray samples and the backprojection table are computed on
/// first use and reused by later applications.
pub struct RayTransform<T: Real> {
    pub(crate) metric: ConformalMetric<T>,
    pub(crate) grid: Arc<DiskGrid<T>>,
    pub(crate) nt: usize,
    pub(crate) fan: FanBeamGrid,
    pub(crate) opts: TraceOptions<T>,
    pub(crate) interp: FanInterp,
    rays: OnceLock<Option<RayCache<T>>>,
    pub(crate) back: OnceLock<Result<BackPlan<T>>>,
}

impl<T: Real> RayTransform<T> {
    pub fn new(
        metric: ConformalMetric<T>,
        grid: Arc<DiskGrid<T>>,
        nt: usize,
        fan: FanBeamGrid,
        opts: TraceOptions<T>,
    ) -> Result<Self> {
        validate_ntheta(nt)?;
        if !(opts.step > T::zero()) {
            return Err(crate::error::Error::InvalidParams("ray step must be positive".into()));
        }
        Ok(RayTransform {
            metric,
            grid,
            nt,
            fan,
            opts,
            interp: FanInterp::default(),
            rays: OnceLock::new(),
            back: OnceLock::new(),
        })
    }

    /// Interpolation used by the backprojection.
    pub fn with_interpolation(mut self, interp: FanInterp) -> Self {
        self.interp = interp;
        self
    }

    pub fn interpolation(&self) -> FanInterp {
        self.interp
    }

    pub fn metric(&self) -> &ConformalMetric<T> {
        &self.metric
    }

    pub fn grid(&self) -> &Arc<DiskGrid<T>> {
        &self.grid
    }

    pub fn ntheta(&self) -> usize {
        self.nt
    }

    pub fn fan(&self) -> FanBeamGrid {
        self.fan
    }

    pub fn options(&self) -> TraceOptions<T> {
        self.opts
    }

    /// Samples of the ray entering at fan-beam node `r` (appended to `out`).
    pub(crate) fn trace_ray(&self, r: usize, out: &mut Vec<RaySample<T>>, ts: &mut Vec<T>) -> Result<()> {
        let (i, j) = (r / self.fan.nalpha, r % self.fan.nalpha);
        let (beta, alpha) = (self.fan.beta::<T>(i), self.fan.alpha::<T>(j));
        let start = PhasePoint::from_fan_beam(beta, alpha);
        ts.clear();
        let base = out.len();
        if self.metric.is_flat() {
            let tau = T::lit(2.0) * alpha.cos();
            let (s, c) = start.theta.sin_cos();
            let h = self.opts.step;
            let mut t = T::zero();
            while t < tau {
                ts.push(t);
                t += h;
            }
            ts.push(tau);
            for &t in ts.iter() {
                out.push(RaySample { x1: start.x1 + t * c, x2: start.x2 + t * s, theta: start.theta, w: T::zero() });
            }
        } else {
            let tracer = Tracer::new(&self.metric, self.opts);
            tracer.run(start, |t, p| {
                ts.push(t);
                out.push(RaySample { x1: p.x1, x2: p.x2, theta: p.theta, w: T::zero() });
            })?;
        }
        for (s, w) in out[base..].iter_mut().zip(trapezoid_weights(ts)) {
            s.w = w;
        }
        Ok(())
    }

    fn cache(&self) -> Option<&RayCache<T>> {
        self.rays
            .get_or_init(|| {
                if self.metric.is_flat() {
                    return None;
                }
                let per_ray = (T::lit(2.0) / self.opts.step).to_usize().unwrap_or(usize::MAX).saturating_add(3);
                let bytes = per_ray
                    .saturating_mul(self.fan.len())
                    .saturating_mul(std::mem::size_of::<RaySample<T>>());
                if bytes > CACHE_BUDGET_BYTES {
                    return None;
                }
                let per: Vec<Vec<RaySample<T>>> = (0..self.fan.len())
                    .into_par_iter()
                    .map_init(Vec::new, |ts, r| {
                        let mut v = Vec::new();
                        self.trace_ray(r, &mut v, ts).ok().map(|_| v)
                    })
                    .collect::<Option<Vec<_>>>()?;
                let mut offsets = Vec::with_capacity(per.len() + 1);
                let mut samples = Vec::with_capacity(per.iter().map(Vec::len).sum());
                offsets.push(0);
                for v in per {
                    samples.extend(v);
                    offsets.push(samples.len());
                }
                Some(RayCache { offsets, samples })
            })
            .as_ref()
    }

    /// `sum_samples w * f(sample)` for every fan-beam node, in node order.
    pub(crate) fn integrate_rays(&self, f: impl Fn(&RaySample<T>) -> T + Sync) -> Result<Vec<T>> {
        if let Some(cache) = self.cache() {
            return Ok((0..self.fan.len())
                .into_par_iter()
                .map(|r| {
                    let s = &cache.samples[cache.offsets[r]..cache.offsets[r + 1]];
                    s.iter().fold(T::zero(), |acc, p| acc + p.w * f(p))
                })
                .collect());
        }
        (0..self.fan.len())
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(buf, ts), r| {
                    buf.clear();
                    self.trace_ray(r, buf, ts)?;
                    Ok(buf.iter().fold(T::zero(), |acc, p| acc + p.w * f(p)))
                },
            )
            .collect()
    }
}
