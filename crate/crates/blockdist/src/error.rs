//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block index {index} out of range for partition with {blocks} blocks")]
    BlockOutOfRange { index: usize, blocks: usize },

    #[error("duplicate point at input positions {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("coordinate {value} exceeds the magnitude bound {bound} for dimension {dim}")]
    CoordinateOverflow { value: i64, bound: i64, dim: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pair count {pairs} exceeds the pair budget {budget}")]
    PairBudgetExceeded { pairs: u128, budget: u128 },

    #[error("point budget exceeded: {requested} points requested, budget {budget}")]
    PointBudgetExceeded { requested: u128, budget: u64 },

    #[error(
        "no lattice points with squared norm {radius_sq} in dimension {dim}; \
         try a squared radius with many representations, e.g. a power of 25"
    )]
    EmptySphere { dim: usize, radius_sq: u64 },

    #[error("point set file is malformed at line {line}: {message}")]
    MalformedFile { line: usize, message: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
