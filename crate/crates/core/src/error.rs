use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("line {line}: {message}")]
    Domain { line: u64, message: String },

    #[error("line {line}: timestamp {current} does not follow {previous}")]
    Ordering {
        line: u64,
        previous: String,
        current: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range ({message})")]
    Index { index: usize, message: String },

    #[error("non-finite value at step {step}: {message}")]
    NonFinite { step: usize, message: String },

    #[error("model file error: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
