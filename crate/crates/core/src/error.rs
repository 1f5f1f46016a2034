use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("unsupported model version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("invalid filter state: {0}")]
    FilterState(String),

    #[error("document {doc_id} out of range (corpus has {len} documents)")]
    DocumentOutOfRange { doc_id: usize, len: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
