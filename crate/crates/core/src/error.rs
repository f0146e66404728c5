use thiserror::Error;

use crate::circuit::ValidationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the configured maximum of {max}")]
    DimensionCap { dim: usize, max: usize },

    /// An enumeration or exact computation would exceed its configured size.
    /// `required` is the size the request needs, in the same unit as `cap`.
    #[error("{what}: requires {required}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: u64,
        cap: u64,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(#[from] ValidationError),

    #[error("invalid referee: {0}")]
    InvalidReferee(String),

    #[error("operation not available for {0} referees")]
    UnsupportedMode(&'static str),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
