use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid Pauli character {0:?} (expected one of I, X, Y, Z)")]
    InvalidPauliChar(char),

    #[error("empty Pauli string")]
    EmptyPauli,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured resource guard (qubits, grid size, node budget, ...) was hit.
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("numerical drift: {0}")]
    NumericalDrift(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::GuardExceeded(msg.into())
    }

    /// True for errors caused by a resource guard rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
