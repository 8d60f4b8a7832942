//! Crate-wide error type and the exit-code mapping used by the CLI.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid ring configuration (base or digit count out of range).
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    /// Caller violated an operation precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Vector/matrix/collection dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// The requested computation exceeds the configured enumeration or
    /// table limits.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Malformed textual input (polynomials, collections, ranges, ...).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for this error class: 2 parse, 3 capacity,
    /// 4 dimension/precondition/configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Capacity(_) => 3,
            Error::InvalidSpec(_) | Error::Usage(_) | Error::Dimension(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
