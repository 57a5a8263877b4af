//! Replicated passage-time experiments over a grid of wedge widths.

mod output;
mod plan;
mod run;
mod verdicts;

pub use output::{write_jsonl, write_summary_csv, CSV_HEADER, SCHEMA};
pub use plan::{ExperimentPlan, Measurement, MIN_CI_REPLICAS};
pub use run::{aggregate, run, DualityTally, ExperimentRecord, RawSample, SummaryRow};
pub use verdicts::{
    clt_test, clt_test_with, iota_variance_test, variance_mean_test, variance_mean_series, CltReport, IotaRow, IotaVerdict,
    VarianceMeanVerdict, VarMeanPoint, VerdictStatus, BAND_LIMIT, CLT_MIN_REPLICAS, CLT_NULL_DRAWS, TREND_SLOPE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("duality violated at n = {n}, replica {replica}: T^B = {tb}, Y_n = {y}")]
    Duality { n: usize, replica: usize, tb: f64, y: u64 },
    #[error("measurement {0} is not in the record")]
    MissingMeasurement(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("samples are degenerate: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Wedge(#[from] wedge::WedgeError),
    #[error(transparent)]
    Model(#[from] randomness::ModelError),
    #[error(transparent)]
    Fpp(#[from] fpp_core::FppError),
    #[error(transparent)]
    Sequence(#[from] sequences::SeqError),
    #[error(transparent)]
    Stats(#[from] mc_stats::StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
