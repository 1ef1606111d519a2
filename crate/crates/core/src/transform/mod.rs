//! Fan-beam ray transform on the disk, its adjoint (the invariant extension
//! of boundary data) and the tensor versions.

mod backproject;
mod fanbeam;
mod forward;
mod rays;

pub use backproject::*;
pub use fanbeam::*;
pub use forward::*;
pub use rays::RayTransform;
