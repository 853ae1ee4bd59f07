use thiserror::Error;

/// Errors raised by cone, matrix, kernel and iteration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty vector")]
    Empty,

    #[error("vector is identically zero and does not lie in the cone")]
    ZeroVector,

    #[error("entry {index} is negative or not finite ({value})")]
    InvalidEntry { index: usize, value: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("matrix is not square ({rows} rows, row {row} has {cols} entries)")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("column {column} is zero, the matrix does not map the cone into itself")]
    ZeroColumn { column: usize },

    #[error("image of the vector is identically zero")]
    ZeroImage,

    #[error("entry ({row}, {col}) is not strictly positive")]
    NotStrictlyPositive { row: usize, col: usize },

    #[error(
        "zero entry ({row}, {col}) lies outside the all-zero rows and columns, \
         the operator is not uniformly positive"
    )]
    NotUniformlyPositive { row: usize, col: usize },

    #[error("contraction coefficient equals 1, no finite uniform-positivity constant")]
    NotContracting,

    #[error("vector has a zero entry at {index}, ratio bounds need a strictly positive vector")]
    NotStrictlyPositiveVector { index: usize },

    #[error(
        "kernel not uniformly factorizable at this resolution: zero value at grid \
         point ({row}, {col}) outside the all-zero rows and columns"
    )]
    NotFactorizable { row: usize, col: usize },

    #[error("invalid kernel grid: {0}")]
    InvalidGrid(String),

    #[error("empty matrix sequence")]
    EmptySequence,
}

pub type Result<T> = std::result::Result<T, Error>;
