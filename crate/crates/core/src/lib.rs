//! Geodesic ray transforms on simple conformal disks: fields on the sphere
//! bundle, symmetric tensors and their solenoidal decomposition, the
//! fan-beam transform with its adjoint, and the construction of first
//! integrals with prescribed tensor moments.
//!
//! Everything is generic over [`scalar::Real`]; the aliases below fix `f64`.

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod krylov;
pub mod quadrature;
pub mod reconstruct;
pub mod scalar;
pub mod sm;
pub mod tensor;
pub mod tolerances;
pub mod transform;

pub use error::{Error, Result};

pub type Metric = geometry::ConformalMetric<f64>;
pub type Grid = grid::DiskGrid<f64>;
pub type Field = sm::SmField<f64>;
pub type Tensor = tensor::SymTensorField<f64>;
pub type FanData = transform::FanBeamData<f64>;
pub type Transform = transform::RayTransform<f64>;
pub type Report = reconstruct::ReconstructionReport<f64>;
