use thiserror::Error;
use wedge::WedgeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FppError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("target unreachable from source")]
    Disconnected,
    #[error("certificate rejected: {0}")]
    BadCertificate(String),
    #[error(transparent)]
    Wedge(#[from] WedgeError),
}
