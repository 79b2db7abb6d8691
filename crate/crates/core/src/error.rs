use thiserror::Error;

use crate::opalg::ParseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} out of range 0..{bound}")]
    Range { value: usize, bound: usize },

    #[error("invalid mode {sector}:{serial}, sector holds {count} modes")]
    Index {
        sector: String,
        serial: usize,
        count: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity exceeded: {modes} modes requested, oracle ceiling is {ceiling}")]
    Capacity { modes: usize, ceiling: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degree overflow: degree {degree} exceeds dimension {dim}")]
    Degree { degree: usize, dim: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
