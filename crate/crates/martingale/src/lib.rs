//! Leftmost open crossings of the even blocks `R'_i`, the first crossed block
//! `m(i)`, and nested Monte Carlo estimates of the martingale increments of
//! `T(0, Gamma_{i0})`, with statistical checks on them.
//!
//! Inner expectations use the representation where the inner field only has
//! to be scanned up to `m(m(i) + 1)`, so each inner replica touches a few
//! blocks past `m(i)`.

mod checks;
mod delta;
mod error;
mod leftmost;
pub mod oracle;
mod scan;

pub use checks::{
    check_moment_bounds, correlation_check, gamma_clt, geometric_tail, mean_checks, summarize, telescoping_check,
    CorrelationCheck, GammaClt, GeometricTail, MartingaleSummary, MeanCheck, MomentReport, MomentRow, TailRow,
    TelescopingCheck, MOMENT_BAND, RHO_THRESHOLD,
};
pub use delta::{DeltaEstimate, Martingale, MartingaleConfig, OuterRecord};
pub use error::MartError;
pub use leftmost::{interior, is_top_down_crossing, leftmost_crossing, CrossingState, Interior};
pub use scan::{block_columns, find_m, DEFAULT_CAP};
