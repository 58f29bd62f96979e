use thiserror::Error;

/// Errors raised by dataset handling, flow construction and model I/O.
#[derive(Debug, Error)]
pub enum DtfError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cardinality mismatch at feature {feature}: expected {expected}, got {got}")]
    CardinalityMismatch {
        feature: usize,
        expected: usize,
        got: usize,
    },

    #[error("value {value} out of range for feature {feature} with {cardinality} categories")]
    ValueOutOfRange {
        feature: usize,
        value: usize,
        cardinality: usize,
    },

    #[error("row {feature} is not a permutation of 0..{len}")]
    NotAPermutation { feature: usize, len: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("enumeration guard exceeded: {size} > {limit}")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("csv error: {0}")]
    Csv(String),

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DtfError>;
