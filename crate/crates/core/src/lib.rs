//! Counting statistics of eigenvalues in a centered disc for rotationally
//! invariant planar Coulomb gases at β = 2 and β = 4.

pub mod ensembles;
pub mod error;
pub mod moments;
pub mod quadrature;
pub mod sampler;
pub mod statistics;
pub mod verify;
pub mod specfun;

pub use error::{Error, Result};
