//! Nodal discontinuous Galerkin micro-macro solver for the 1D BGK model.

pub mod dg;
pub mod error;
pub mod harness;
pub mod imex;
pub mod kinetic;
pub mod limiter;
pub mod ns;
pub mod quadrature;
pub mod schemes;
pub mod velocity;

pub use error::{BgkError, Result};
