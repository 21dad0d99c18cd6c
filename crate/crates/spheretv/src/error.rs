use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error("container holds {found} but {expected} is required")]
    KindMismatch { expected: String, found: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Core(spheretv_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("png: {0}")]
    Png(#[from] png::EncodingError),
}

impl From<spheretv_core::Error> for Error {
    fn from(e: spheretv_core::Error) -> Self {
        match e {
            spheretv_core::Error::Diverged { .. } => Error::Diverged(e.to_string()),
            other => Error::Core(other),
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 3 for a kind mismatch, 4 for divergence, 2 for
    /// any other bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KindMismatch { .. } => 3,
            Error::Diverged(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
