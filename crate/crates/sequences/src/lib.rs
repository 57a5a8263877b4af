//! Block sequences `0 = r_0 < r_1 < ...` cutting the wedge into regions
//! `R_i = {r_i <= x1 <= r_{i+1}}`, built per parameter regime, plus Monte Carlo
//! audits of the three block assumptions (crossing probability, mean increment,
//! line-to-line tail).

mod audit;
mod error;
mod sequence;
mod split;

pub use audit::{audit_assumptions, xi_sensitivity, AssumptionAudit, AuditConfig, AuditPoint, SensitivityRow, TailRow};
pub use error::SeqError;
pub use sequence::{build_sequence, sub_xi_width, BlockSequence, Regime, AT_XI_TOLERANCE, J0_WINDOW};
pub use split::{split_blocks, split_blocks_even};
