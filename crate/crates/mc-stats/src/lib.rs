//! Statistics shared by the estimators and the experiment harness.

mod ks;
mod regression;
mod summary;

pub use ks::{kolmogorov_sf, ks_normal_test, ks_statistic, KsResult};
pub use regression::{linear_fit, weighted_linear_fit, LinearFit};
pub use summary::{neumaier_sum, wilson_interval, Summary, Z95};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples have zero variance")]
    ZeroVariance,
    #[error("regression needs at least two distinct x values")]
    Degenerate,
}
