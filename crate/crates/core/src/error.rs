use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid root system: {0}")]
    RootSystem(String),

    #[error("invalid group: {0}")]
    Group(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {intervals} intervals")]
    Quadrature {
        value: f64,
        error: f64,
        intervals: usize,
    },

    /// Richardson error estimate exceeded the accepted relative precision.
    #[error("finite-difference precision lost: estimate {value:e}, error {error:e}")]
    PrecisionLoss { value: f64, error: f64 },

    /// Oracle exceeds the bound by more than e^700 somewhere on the grid.
    #[error("bound shape mismatch: log ratio {log_ratio} at grid point {index}")]
    ShapeMismatch { log_ratio: f64, index: usize },

    #[error("orbit enumeration cannot certify completeness: {0}")]
    Certification(String),

    #[error("tail bound diverges: {0}")]
    TailDiverges(String),

    #[error("radius {radius} outside certified orbit range {certified}")]
    OutsideCertifiedRange { radius: f64, certified: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
