use thiserror::Error;

use crate::verdict::Witness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("series has zero constant term and is not a unit")]
    ZeroConstantTerm,

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("monomial of degree {degree} at offset {offset} exceeds truncation {truncation}")]
    DegreeOverflow {
        offset: usize,
        degree: u32,
        truncation: u32,
    },

    #[error("expected a {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("linear system inconsistent at degree {degree}: {witness}")]
    Inconsistent { degree: u32, witness: String },

    #[error("bundle mismatch: rank {0} vs rank {1}")]
    BundleMismatch(usize, usize),

    #[error("connection is not flat: {0}")]
    NotFlat(Witness),

    #[error("superconnection half does not square to zero ({half}): {witness}")]
    NotFlatHalves { half: String, witness: Witness },

    #[error("bidegree violation: {0}")]
    Bidegree(String),

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("config error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
