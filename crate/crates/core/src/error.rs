use thiserror::Error;

/// Errors shared across the codec, design, and bound modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dimension mismatch: vector of length {vec_len} against {rows}x{cols} matrix")]
    DimensionMismatch {
        vec_len: usize,
        rows: usize,
        cols: usize,
    },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("frozen value count {got} does not match frozen set size {expected}")]
    FrozenLengthMismatch { got: usize, expected: usize },
    #[error("infeasible design: {0}")]
    Infeasible(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("inconsistent coset: {0}")]
    InconsistentCoset(String),
    #[error("code digest mismatch between helper bundle and code description")]
    DigestMismatch,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
