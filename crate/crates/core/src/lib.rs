//! Numerical verification of heat-kernel derivative bounds on symmetric
//! spaces, their quotients by discrete groups, and the `Lᵖ` thresholds that
//! follow from them, checked against exact kernels on `H²` and `H³`.

// Domain checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod envelope;
pub mod error;
pub mod lattice;
pub mod lpthresholds;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod rootspace;
pub mod suites;

pub use error::{Error, Result};
