//! Exact computations on a single weight field: passage times by shortest paths,
//! and the matching crossing counts by unit-capacity max-flow.
//!
//! The Bernoulli passage time `T^B(0, P(n))` equals the maximum number of
//! edge-disjoint closed dual paths from the top of the wedge to the bottom. The two
//! sides are computed by unrelated algorithms (0-1 BFS and Dinic) so that each
//! checks the other.

mod certificate;
mod crossing;
mod dual;
mod error;
mod flow;
mod passage;

pub use certificate::{verify_dual_certificate, verify_open_certificate};
pub use crossing::{left_right_crossings, open_crossing_count, top_down_cluster, top_down_crossing_exists, Segment, Side};
pub use dual::{dual_level_count, dual_separating_count, CrossingCount, CrossingKind, DualGraph};
pub use error::FppError;
pub use flow::{FlowNetwork, INF_CAP};
pub use passage::{
    line_passage_times, passage_time, path_weight, Endpoint, Mode, PassageQuery, PassageResult, ShortestPaths,
};
