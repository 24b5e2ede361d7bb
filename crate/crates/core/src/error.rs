use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u64 },

    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),

    #[error("invalid symbol {symbol:?} at position {position}: {reason}")]
    InvalidSymbol {
        position: usize,
        symbol: String,
        reason: String,
    },

    #[error("position {0} is gapped in v")]
    InvalidPosition(usize),

    #[error("word has {found} gaps, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("position map mismatch: {0}")]
    MapMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
