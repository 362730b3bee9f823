use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter, grid or input field violates its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("elliptic solve did not converge: residual {achieved:.3e} (target {target:.3e}) after {iterations} iterations")]
    Convergence {
        achieved: f64,
        target: f64,
        iterations: usize,
    },

    /// An accepted state came out with a negative density. The scheme is
    /// positivity preserving under its step rule, so this is an internal bug.
    #[error("negative density {value:.6e} in cell {cell} at t = {t:.6e}")]
    NegativeDensity { cell: usize, value: f64, t: f64 },

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit status for this failure: 2 for bad input, 3 for a
    /// numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Experiment(_) | Error::Parse { .. } | Error::Validation(_) => 2,
            Error::Convergence { .. } | Error::NegativeDensity { .. } => 3,
            Error::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
