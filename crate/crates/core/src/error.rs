use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time grid too short: need at least {needed} nodes, got {got}")]
    GridTooShort { needed: usize, got: usize },

    #[error("tolerance {tol:e} not met in {context} (achieved error estimate {achieved:e})")]
    Tolerance {
        context: String,
        achieved: f64,
        tol: f64,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
