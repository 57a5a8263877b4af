use thiserror::Error;
use wedge::WedgeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("regime does not match the parameters: {0}")]
    RegimeMismatch(String),
    #[error("sequence exhausted: needed index {needed}, only {available} entries")]
    Exhausted { needed: usize, available: usize },
    #[error(transparent)]
    Wedge(#[from] WedgeError),
}
