//! Crate-wide error type.

use crate::query::QueryKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("query-type mismatch: model answers {expected:?} queries, got {got:?}")]
    QueryMismatch { expected: QueryKind, got: QueryKind },

    #[error("indicator has no occupied cells: nothing to bound")]
    EmptyIndicator,

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("file truncated: needed {needed} more bytes")]
    Truncated { needed: usize },

    #[error("payload length mismatch: expected {expected} bytes, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("training did not converge{}", .node.as_ref().map(|n| format!(" at hierarchy node {n}")).unwrap_or_default())]
    NotConverged { node: Option<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
