//! Quadrature, finite differences, log-space arithmetic and sampling grids.

pub mod diff;
pub mod grid;
pub mod logspace;
pub mod quad;

pub use diff::{richardson_derivative, FdEstimate};
pub use grid::{Axis, Grid2, Scale};
pub use logspace::SignedLog;
pub use quad::{Integrator, Quadrature};
