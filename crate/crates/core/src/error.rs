use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("sample budget exhausted: {0}")]
    Budget(String),

    #[error("untrained: {0}")]
    Untrained(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
