//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{solver} solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("advective CFL number {cfl:.4} exceeds the limit {limit}")]
    CflViolation { cfl: f64, limit: f64 },

    #[error("energy audit failed: relative violation {violation:.3e} exceeds {tolerance:.1e}")]
    AuditFailed { violation: f64, tolerance: f64 },

    #[error("initial concentration range [{min}, {max}] exceeds the admissible interval [{f1}, {f2}]")]
    InitialRange { min: f64, max: f64, f1: f64, f2: f64 },

    #[error("mismatched trajectories: {0}")]
    Sampling(String),

    #[error("empty trace")]
    EmptyTrace,

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Numerical failures (solver breakdown, CFL, audit) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::CflViolation { .. } | Error::AuditFailed { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
