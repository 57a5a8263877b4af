use mc_stats::StatsError;
use sequences::SeqError;
use thiserror::Error;
use wedge::WedgeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MartError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no top-down open crossing of columns {lo}..={hi}")]
    NoCrossing { lo: usize, hi: usize },
    #[error("no crossing in blocks {start}..={last}")]
    CapExceeded { start: usize, last: usize },
    #[error("block sequence too short: need block {needed}, have {available}")]
    SequenceTooShort { needed: usize, available: usize },
    #[error("block {i}: {discards} of {samples} inner replicas discarded")]
    TooManyDiscards { i: usize, discards: usize, samples: usize },
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Wedge(#[from] WedgeError),
    #[error(transparent)]
    Sequence(#[from] SeqError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
