use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not in the feasible set")]
    Infeasible,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("algorithm requires {required} domain, got {got}")]
    UnsupportedDomain { required: &'static str, got: &'static str },

    #[error("invalid window [{lo}, {hi}) for length {len}")]
    InvalidWindow { lo: usize, hi: usize, len: usize },

    #[error("non-positive error at t = {0}")]
    NonPositiveError(usize),

    #[error("missing {0}")]
    Missing(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
