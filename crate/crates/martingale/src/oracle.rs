//! Exhaustive reference for [`leftmost_crossing`](crate::leftmost_crossing) on tiny blocks.

use randomness::{WeightField, WeightModel};
use serde::{Deserialize, Serialize};
use wedge::{EdgeDir, WedgeGraph};

use crate::leftmost::{interior, leftmost_crossing, open_step};
use crate::MartError;

/// Tolerance when comparing interior measures.
pub const MEASURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub path: Vec<usize>,
    pub measure: f64,
    /// Number of crossings enumerated.
    pub candidates: usize,
    /// Whether no other crossing comes within [`MEASURE_TOL`] of the minimum.
    pub unique: bool,
}

/// Enumerates every vertex self-avoiding open path inside columns `lo..=hi`
/// from a top vertex to the axis (touching the axis only at its end) and
/// returns the one with the smallest interior measure.
///
/// Returns `Ok(None)` when there is no crossing. Exponential; meant for blocks
/// with a few dozen edges.
pub fn brute_force_leftmost(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> Result<Option<BruteForce>, MartError> {
    let mut found: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut on_path = vec![false; graph.num_vertices()];
    for x in lo..=hi {
        let y = graph.height(x) as usize;
        let mut path = vec![(x, y)];
        on_path[graph.vertex(x, y).unwrap()] = true;
        extend(graph, field, lo, hi, &mut path, &mut on_path, &mut found)?;
        on_path[graph.vertex(x, y).unwrap()] = false;
    }
    let candidates = found.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut runner_up = f64::INFINITY;
    for (m, p) in found {
        match &best {
            Some((bm, _)) if m >= *bm => runner_up = runner_up.min(m),
            _ => {
                if let Some((bm, _)) = &best {
                    runner_up = runner_up.min(*bm);
                }
                best = Some((m, p));
            }
        }
    }
    Ok(best.map(|(measure, path)| BruteForce { path, measure, candidates, unique: runner_up > measure + MEASURE_TOL }))
}

fn extend(
    graph: &WedgeGraph,
    field: &WeightField,
    lo: usize,
    hi: usize,
    path: &mut Vec<(usize, usize)>,
    on_path: &mut [bool],
    found: &mut Vec<(f64, Vec<usize>)>,
) -> Result<(), MartError> {
    let here = *path.last().unwrap();
    if here.1 == 0 {
        let ids: Vec<usize> = path.iter().map(|&(x, y)| graph.vertex(x, y).unwrap()).collect();
        found.push((interior(graph, lo, &ids)?.measure, ids));
        return Ok(());
    }
    for dir in 0..4 {
        if let Some(next) = open_step(graph, field, lo, hi, here, dir) {
            let v = graph.vertex(next.0, next.1).unwrap();
            if !on_path[v] {
                on_path[v] = true;
                path.push(next);
                extend(graph, field, lo, hi, path, on_path, found)?;
                path.pop();
                on_path[v] = false;
            }
        }
    }
    Ok(())
}

/// Agreement between the wall-follower and the exhaustive search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub configs: usize,
    pub with_crossing: usize,
    /// Configurations where the two disagree (including on existence).
    pub mismatches: usize,
    /// Configurations whose minimum is not unique.
    pub ties: usize,
}

impl Certification {
    pub fn clean(&self) -> bool {
        self.mismatches == 0 && self.ties == 0
    }

    fn absorb(&mut self, other: Certification) {
        self.configs += other.configs;
        self.with_crossing += other.with_crossing;
        self.mismatches += other.mismatches;
        self.ties += other.ties;
    }
}

/// Edges with both endpoints in columns `lo..=hi`.
pub fn block_edges(graph: &WedgeGraph, lo: usize, hi: usize) -> Vec<usize> {
    graph
        .edges()
        .filter(|&(_, x, _, dir)| (lo..=hi).contains(&x) && (dir == EdgeDir::Up || x < hi))
        .map(|(e, ..)| e)
        .collect()
}

fn compare(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> Result<Certification, MartError> {
    let mut c = Certification { configs: 1, ..Default::default() };
    let wall = match leftmost_crossing(graph, field, lo, hi) {
        Ok(p) => Some(p),
        Err(MartError::NoCrossing { .. }) => None,
        Err(e) => return Err(e),
    };
    let brute = brute_force_leftmost(graph, field, lo, hi)?;
    if let Some(b) = &brute {
        c.with_crossing = 1;
        c.ties = usize::from(!b.unique);
    }
    c.mismatches = usize::from(wall.as_deref() != brute.as_ref().map(|b| b.path.as_slice()));
    Ok(c)
}

/// Runs both methods on every open/closed assignment of the block's edges.
pub fn certify_exhaustive(graph: &WedgeGraph, lo: usize, hi: usize) -> Result<Certification, MartError> {
    let edges = block_edges(graph, lo, hi);
    if edges.len() > 20 {
        return Err(MartError::InvalidParameter(format!("{} edges is too many to enumerate", edges.len())));
    }
    let model = WeightModel::constant(0.5);
    let mut total = Certification::default();
    for mask in 0u32..1 << edges.len() {
        let mut bits = vec![1u8; graph.num_edges()];
        for (k, &e) in edges.iter().enumerate() {
            bits[e] = ((mask >> k) & 1) as u8;
        }
        total.absorb(compare(graph, &WeightField::from_bits(&model, bits), lo, hi)?);
    }
    Ok(total)
}

/// Runs both methods on `samples` Bernoulli(`p`) fields restricted to the block.
pub fn certify_random(graph: &WedgeGraph, lo: usize, hi: usize, p: f64, samples: usize, seed: u64) -> Result<Certification, MartError> {
    let model = WeightModel::constant(p);
    let mut total = Certification::default();
    for k in 0..samples {
        let field = WeightField::sample_columns(&model, graph, seed, k as u64, lo, hi);
        total.absorb(compare(graph, &field, lo, hi)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wedge::WedgeFunction;

    #[test]
    fn all_open_three_by_three() {
        let g = WedgeGraph::build(&WedgeFunction::Custom { values: vec![0.0, 2.5, 2.5, 2.5] }, 3).unwrap();
        let f = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
        let b = brute_force_leftmost(&g, &f, 1, 3).unwrap().unwrap();
        assert!(b.unique);
        assert_eq!(b.measure, 0.0);
        let xs: Vec<usize> = b.path.iter().map(|&v| g.coords(v).0).collect();
        assert_eq!(xs, vec![1, 1, 1]);
        assert!(b.candidates > 10);
    }

    #[test]
    fn closed_block() {
        let g = WedgeGraph::build(&WedgeFunction::Custom { values: vec![0.0, 2.5, 2.5, 2.5] }, 3).unwrap();
        let f = WeightField::sample(&WeightModel::constant(0.0), &g, 0, 0);
        assert_eq!(brute_force_leftmost(&g, &f, 1, 3).unwrap(), None);
    }
}
