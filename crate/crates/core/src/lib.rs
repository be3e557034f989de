//! Random-matrix discrepancy toolkit for the Gaussian orthogonal ensemble.
//!
//! The crate samples GOE matrices, evaluates their closed-form matrix and
//! eigenvalue densities, computes small-norm probabilities and the moment
//! bounds behind the `2 e^{-3/4} sqrt(nm) 4^{-xi n / m^2}` discrepancy scale,
//! and searches signings exactly or heuristically for the minimal norm.

pub mod densities;
pub mod discrepancy;
pub mod error;
pub mod laplace;
pub mod quadrature;
pub mod rmt;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use rng::RandomStream;
