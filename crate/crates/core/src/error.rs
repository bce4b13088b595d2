//! Error types shared by every module.

use std::path::PathBuf;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A cell could not be parsed; `row` is the 1-based data row.
    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    /// Well-formed input that violates a data contract (duplicate dates,
    /// non-positive prices, bad manifest entries).
    #[error("data integrity: {0}")]
    Integrity(String),

    /// No common calendar could be built from the input series.
    #[error("alignment: {0}")]
    Alignment(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A series with zero variance where a standardized one is required.
    #[error("degenerate series: {0}")]
    Degenerate(String),

    /// Mismatched lengths or incompatible dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A parameter outside its admissible range.
    #[error("range: {0}")]
    Range(String),

    /// A regression that cannot be performed (too few usable points).
    #[error("fit: {0}")]
    Fit(String),

    /// Numerical failure (non-convergence, non-finite intermediate).
    #[error("numeric: {0}")]
    Numeric(String),

    /// A precondition stated by an operation's contract was violated.
    #[error("precondition: {0}")]
    Precondition(String),

    /// Invalid run configuration (CLI usage level).
    #[error("config: {0}")]
    Config(String),

    /// Causality contract violation in the walk-forward pipeline.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code class for the CLI: 2 usage, 3 data, 4 numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            Error::Parse { .. }
            | Error::Integrity(_)
            | Error::Alignment(_)
            | Error::InsufficientData(_)
            | Error::Degenerate(_)
            | Error::Io { .. } => 3,
            Error::Shape(_)
            | Error::Range(_)
            | Error::Fit(_)
            | Error::Numeric(_)
            | Error::Precondition(_)
            | Error::Contract(_) => 4,
        }
    }
}
