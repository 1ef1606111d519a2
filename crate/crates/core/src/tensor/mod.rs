//! Symmetric tensor fields of rank 0, 1 and 2 on the disk.

mod calculus;
mod decompose;
mod ell;
mod extension;
mod field;

pub use calculus::*;
pub use decompose::*;
pub use ell::*;
pub use extension::*;
pub use field::*;
