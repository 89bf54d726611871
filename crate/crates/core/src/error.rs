use thiserror::Error;

/// Errors produced by profile construction, tokenization, search and grid accounting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty message")]
    EmptyMessage,

    #[error("invalid tiling: {0}")]
    InvalidTiling(String),

    #[error("symbol covers {covered} units but the message has only {length}")]
    SymbolExceedsMessage { covered: u64, length: u64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("diversity {diversity} exceeds scope {scope}")]
    DiversityExceedsScope { diversity: u64, scope: u64 },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("message length {length} exceeds enumeration cap {cap}")]
    EnumerationCap { length: usize, cap: usize },

    #[error("block size must be at least 1")]
    InvalidBlockSize,

    #[error("unknown scale selector `{0}` (expected chars, words, bits, ngram:N or fundamental)")]
    InvalidScale(String),

    #[error("bit expansion requires a byte-mode message")]
    NotByteMode,

    #[error("grid parse error: {0}")]
    GridParse(String),

    #[error("tiling is not a partition of the grid: {0}")]
    PartitionError(String),

    #[error("downgrade target must be at least 1")]
    InvalidDowngradeTarget,
}

pub type Result<T> = std::result::Result<T, Error>;
