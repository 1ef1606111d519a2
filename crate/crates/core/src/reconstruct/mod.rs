//! Inversion of the normal operator and construction of first integrals.

mod first_integral;
mod solve;

pub use first_integral::*;
pub use solve::*;
