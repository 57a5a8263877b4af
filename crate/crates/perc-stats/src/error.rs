use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PercError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
}
