//! Which growth law `E T(0, P(n))` follows for given `(a, b, p)`, the rate
//! functions themselves, and fits of measured curves against them.

mod classify;
mod fit;

pub use classify::{classify, GrowthRegime, RegimeClassification, XiInput, NEAR_CRITICAL};
pub use fit::{fit_against_rate, FitReport, FitVerdict, CONSISTENT_SLOPE, MIN_POINTS, MIN_SPAN};

use mc_stats::StatsError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegimeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("outside the domain of the rate: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
