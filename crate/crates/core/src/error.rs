use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("not a valid quantum state: {0}")]
    NotAState(String),

    #[error("basis states are not orthogonal (overlap {0:.3e})")]
    InvalidBasis(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid polytope level {0} (must be >= 1)")]
    InvalidLevel(f64),

    #[error("inconsistent reference levels: {0:?}")]
    InconsistentReference([f64; 4]),

    #[error("invalid cloning machine: {0}")]
    InvalidMachine(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid broadcaster spec: {0}")]
    InvalidSpec(String),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    InvalidUnitary(f64),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
