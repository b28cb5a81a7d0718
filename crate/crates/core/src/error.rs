use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid datum: {0}")]
    InvalidDatum(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pole collision: s0 + b[{j}] + {n} = 0")]
    PoleCollision { j: usize, n: usize },

    #[error("truncation exhausted: {0}")]
    Truncation(String),

    #[error("comparison is indeterminate within the tracked error bound")]
    Indeterminate,

    #[error("tail bound not certifiable: {0}")]
    Uncertifiable(String),

    #[error("no relation found: {0}")]
    NotFound(String),

    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("interrupted after {0} terms")]
    Interrupted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
