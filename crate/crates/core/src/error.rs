use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("enumeration of {requested} cells exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u64 },

    #[error("insufficient precision: need digits down to p^{needed}, value is only known modulo p^{available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("index {index} leaves the window [{n_min}, {n_max}]")]
    WindowClip { index: String, n_min: i64, n_max: i64 },

    #[error("value has no exact representation: {0}")]
    Inexact(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
