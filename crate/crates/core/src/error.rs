use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid weight sequence: {0}")]
    Weights(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("truncation insufficient: {0}")]
    Truncation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
