#![allow(dead_code)]

use std::sync::Arc;

use sm_tomo::geometry::{make_metric, MetricParams, TraceOptions};
use sm_tomo::grid::DiskGrid;
use sm_tomo::transform::{FanBeamGrid, RayTransform};
use sm_tomo::{Grid, Metric, Transform};

/// Default grids scaled by `2^refine`.
#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    pub nx: usize,
    pub ntheta: usize,
    pub nbeta: usize,
    pub nalpha: usize,
    pub step: f64,
}

impl Sizes {
    pub fn desk(refine: u32) -> Self {
        let k = 1usize << refine;
        Sizes { nx: 64 * k + 1, ntheta: 128 * k, nbeta: 256 * k, nalpha: 128 * k, step: 1e-2 / k as f64 }
    }

    pub fn small() -> Self {
        Sizes { nx: 33, ntheta: 64, nbeta: 96, nalpha: 64, step: 2e-2 }
    }
}

pub struct Desk {
    pub metric: Metric,
    pub grid: Arc<Grid>,
    pub rt: Transform,
    pub sizes: Sizes,
}

pub fn desk(params: MetricParams, sizes: Sizes) -> Desk {
    let metric = make_metric(params).unwrap();
    let grid = Arc::new(DiskGrid::new(sizes.nx).unwrap());
    let fan = FanBeamGrid::new(sizes.nbeta, sizes.nalpha).unwrap();
    let rt = RayTransform::new(metric, grid.clone(), sizes.ntheta, fan, TraceOptions::with_step(sizes.step)).unwrap();
    Desk { metric, grid, rt, sizes }
}

pub fn metrics() -> [(&'static str, MetricParams); 2] {
    [("euclidean", MetricParams::euclidean()), ("weak bump", MetricParams::weak_bump())]
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        a / b
    }
}
