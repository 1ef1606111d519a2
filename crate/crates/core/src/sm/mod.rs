//! Functions on the unit sphere bundle: sampling, vertical Fourier analysis,
//! the frame `X, X_perp, V`, the Guillemin-Kazhdan operators and the
//! Liouville inner product.

mod field;
mod fourier;
mod frame;
mod measure;

pub use field::*;
pub use fourier::*;
pub use frame::*;
pub use measure::*;
