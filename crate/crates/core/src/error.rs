use thiserror::Error;

use crate::perron::TransformSeq;

#[derive(Debug, Error)]
pub enum Error {
    #[error("values belong to different embedding bases")]
    BasisMismatch,

    #[error("interval oracle for generator {index} failed: {reason}")]
    Oracle { index: usize, reason: String },

    #[error("sign not decided after {0} refinement rounds")]
    RefinementCap(u32),

    #[error("invalid embedding basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("integer overflow in matrix arithmetic")]
    Overflow,

    #[error("value at position {0} is not positive")]
    NonPositive(usize),

    #[error("tie between values at positions {0} and {1}")]
    Tie(usize, usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration cap of {cap} exceeded after {} recorded steps", partial.steps.len())]
    IterationCap {
        cap: usize,
        partial: Box<TransformSeq>,
    },

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },

    #[error("minimum value is not attained below the truncation degree")]
    AboveTruncation,

    #[error("invalid level {level} for a group of rank {rank}")]
    InvalidLevel { level: usize, rank: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("exponent difference {0:?} is not in the image lattice")]
    NotInImage(Vec<i64>),

    #[error("class is trivial: no kernel derivation separates it")]
    TrivialClass,

    #[error("internal consistency violation: {0}")]
    Inconsistent(String),

    #[error("inadmissible problem: {0}")]
    Inadmissible(String),

    #[error("completion exceeded {0} elements")]
    CompletionCap(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
