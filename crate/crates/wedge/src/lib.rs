//! Wedge boundary functions `f` and the finite graphs `G_f(n)` they cut out of Z².
//!
//! A wedge graph keeps every lattice vertex `(x1, x2)` with `0 <= x1 <= n` and
//! `0 <= x2 <= floor(f(x1))`. Besides the primal graph this crate exposes the
//! highest path along the top of the wedge and the dual boundary sets used by
//! the separating-set counts.

mod error;
mod function;
mod graph;

pub use error::WedgeError;
pub use function::{LevelIndex, WedgeFunction};
pub use graph::{
    edge_key, DualPoint, EdgeDir, GraphExport, WedgeGraph, DEFAULT_MAX_VERTICES,
};
