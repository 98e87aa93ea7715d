use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or dimensions of inputs are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A NaN or infinite value was found where finite data is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Invalid argument or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical procedure failed (singular system, defective operator, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A matrix or bundle file did not match the expected on-disk format.
    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
