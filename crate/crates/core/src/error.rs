use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by plan construction, classification and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid size: {0}")]
    DimensionRange(String),

    #[error("plan needs at least 2 steps, got {0}")]
    PlanSize(usize),

    #[error("conditioning shape mismatch: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    Value(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("solver did not converge after {iterations} iterations (objective {objective}, gap {gap:e})")]
    Convergence {
        iterations: usize,
        objective: f64,
        gap: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable kind name, used by the CLI for machine-parsable messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } | Error::DimensionRange(_) => "DimensionError",
            Error::PlanSize(_) => "PlanSizeError",
            Error::Shape(_) => "ShapeError",
            Error::Value(_) => "ValueError",
            Error::DegenerateTraining(_) => "DegenerateTrainingError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::Io { .. } => "IoError",
            Error::Parse(_) => "ParseError",
            Error::Split(_) => "SplitError",
            Error::Format(_) => "FormatError",
            Error::Range(_) => "RangeError",
        }
    }
}
