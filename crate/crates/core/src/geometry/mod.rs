//! Conformal disk metrics, geodesic tracing and simplicity certification.

mod geodesic;
mod metric;
mod simplicity;

pub use geodesic::*;
pub use metric::*;
pub use simplicity::*;
