use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// Malformed input data. Row numbers are 1-based data rows (header excluded).
    #[error("row {row}, column {column}: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Degenerate numeric input: zero variance, undefined statistics, zero counts.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("undecodable sequence: every hidden path has probability zero")]
    Undecodable,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numeric/degenerate.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::InvalidParameter(_) => 1,
            Error::Io { .. }
            | Error::Csv { .. }
            | Error::Cell { .. }
            | Error::Data(_)
            | Error::DimensionMismatch { .. }
            | Error::Json(_) => 2,
            Error::Degenerate(_) | Error::Undecodable => 3,
        }
    }
}
