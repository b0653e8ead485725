use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("entry count {found} does not match dim^order = {expected}")]
    EntryCount { expected: usize, found: usize },

    #[error("contraction depth {j} out of range 0..={max}")]
    ContractionOutOfRange { j: usize, max: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid interval decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("inadmissible pair set: {0}")]
    Inadmissible(String),

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),

    #[error("domain violation: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
