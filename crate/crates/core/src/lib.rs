//! Orthonormal polynomials for measures with point masses.

mod error;
pub mod grid;
pub mod measure;
pub mod norms;
pub mod opoly;
pub mod quadrature;
pub mod transforms;

pub use error::{Error, Result};
