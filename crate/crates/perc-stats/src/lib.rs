//! Two-dimensional bond percolation estimators in the subcritical phase:
//! connection probabilities, the correlation length, strict-cylinder
//! probabilities, rectangle crossings and the sponge scan.
//!
//! Configurations are drawn lazily from the counter RNG, edge by edge, so cluster
//! explorations only pay for the edges they touch.

mod cluster;
mod error;
mod estimate;
mod rect;
mod slab;
mod sponge;
mod xi;

pub use cluster::{
    cluster_counts, cluster_counts_in, estimate_point_to_box, estimate_point_to_plane, ClusterCounts, Explorer, ProbeBox,
};
pub use error::PercError;
pub use estimate::{phi, ConnectivityCurve, Estimate, Quantity};
pub use rect::{estimate_disjoint_crossings, estimate_rect_crossing, has_left_right_crossing};
pub use slab::{estimate_hn, estimate_hn_in, hn_curve, strict_cylinder_event};
pub use sponge::{
    calibrate_balanced_constant, observed_verdict, predicted_verdict, sponge_phase_scan, PhaseVerdict, SpongeGrowth,
    SpongeRow, SpongeScan,
};
pub use xi::{default_window, estimate_xi, xi_from_curve, XiEstimate, XiTarget};
