use thiserror::Error;

use crate::optimizer::HkcSolution;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum HkcError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative weight {value} at edge index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid time {0}: must be finite and nonnegative (positive where required)")]
    InvalidTime(f64),

    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,

    #[error("singular matrix in Padé denominator")]
    SingularMatrix,

    #[error("invalid coupling data: {0}")]
    InvalidCoupling(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate point at index {index}: zero distance to a neighbor")]
    DuplicatePoint { index: usize },

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },

    #[error("retrieval needs at least two classes")]
    SingleClass,

    #[error("non-finite cost or gradient at iteration {iteration}")]
    NumericalBlowup {
        iteration: usize,
        partial: Box<HkcSolution>,
    },
}

pub type Result<T> = std::result::Result<T, HkcError>;
