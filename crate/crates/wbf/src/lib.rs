//! Exact computation of b-functions with respect to weight vectors for
//! holonomic ideals in the Weyl algebra, specializing to annihilating
//! ideals Ann(f^ℓ), together with the Newton-polytope geometry and the
//! closed-form predictors that cross-check the generic Gröbner pipeline.

pub mod error;
pub mod poly;
pub mod weyl;
pub mod order;
pub mod groebner;

pub use error::{Error, Result};
