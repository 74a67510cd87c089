//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty pool")]
    EmptyPool,
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("empty feature map")]
    EmptyMap,
    #[error("empty segment")]
    EmptySegment,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("lexicon error: {0}")]
    Lexicon(String),
    #[error("snapshot format version {found} is not supported (expected {expected})")]
    SnapshotVersion { found: u32, expected: u32 },
    #[error("snapshot error: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
