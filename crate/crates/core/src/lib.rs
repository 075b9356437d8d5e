//! Eikonal geometry, absorbed Helmholtz solves and radiation-condition checks
//! for long-range electric potentials.

pub mod eikonal;
pub mod error;
pub mod grid;
pub mod harness;
pub mod helmholtz;
pub mod norms;
pub mod potential;
pub mod quadrature;
pub mod verification;

pub use error::{Error, Result};
pub use grid::Grid3;
