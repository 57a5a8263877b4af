//! Reproducible random fields for first-passage and Bernoulli percolation.
//!
//! Every random bit is a pure function of `(seed, stream, edge key, lane)`, so a
//! field can be generated in any order, on any number of threads, or lazily one
//! edge at a time, and always comes out the same.

mod counter;
mod field;
mod model;
mod perc;

pub use counter::{keyed_u64, keyed_uniform, mix64, stream_id, Lane};
pub use field::WeightField;
pub use model::{ModelError, PositiveLaw, WeightModel};
pub use perc::{LazyBernoulli, PercConfig};
