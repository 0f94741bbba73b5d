use std::path::PathBuf;

use thiserror::Error;

use crate::solver::TraceRow;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    /// The solver produced a NaN or infinite objective value. The trace up to
    /// (and including) the offending iteration is kept for diagnosis.
    #[error("non-finite objective at stage {stage}, iteration {iteration}")]
    NonFiniteObjective {
        stage: usize,
        iteration: usize,
        trace: Vec<TraceRow>,
    },

    #[error("single-source solve did not reach tolerance {tol:e} after {iterations} iterations (gap {gap:e})")]
    SingleSourceNotConverged {
        tol: f64,
        iterations: usize,
        gap: f64,
    },

    #[error("brute-force enumeration refused: k^m = {k}^{m} exceeds the limit {limit}")]
    SizeGuard { k: usize, m: usize, limit: f64 },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
