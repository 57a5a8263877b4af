use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use randomness::WeightField;
use serde::{Deserialize, Serialize};
use wedge::WedgeGraph;

use crate::FppError;

const NO_PRED: u32 = u32::MAX;

/// One end of a passage-time query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Vertex(usize),
    /// The vertical line `P(r)` intersected with the wedge.
    Line(usize),
    /// Any vertex set, e.g. the vertices of a crossing.
    Set(Vec<usize>),
}

impl Endpoint {
    fn resolve(&self, graph: &WedgeGraph) -> Result<Vec<usize>, FppError> {
        let out: Vec<usize> = match self {
            Endpoint::Vertex(v) => vec![*v],
            Endpoint::Line(r) => {
                if *r > graph.n() {
                    return Err(FppError::InvalidQuery(format!("line {r} beyond n = {}", graph.n())));
                }
                graph.line(*r).collect()
            }
            Endpoint::Set(vs) => vs.clone(),
        };
        if out.is_empty() {
            return Err(FppError::InvalidQuery("empty endpoint set".into()));
        }
        if let Some(&v) = out.iter().find(|&&v| v >= graph.num_vertices()) {
            return Err(FppError::InvalidQuery(format!("vertex {v} not in the wedge")));
        }
        Ok(out)
    }
}

/// `Bernoulli` uses the weights `t_e`, `General` the weights `tau_e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bernoulli,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageQuery {
    pub source: Endpoint,
    pub target: Endpoint,
    pub mode: Mode,
    /// Restrict paths to columns `lo..=hi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
}

impl PassageQuery {
    pub fn new(source: Endpoint, target: Endpoint, mode: Mode) -> Self {
        PassageQuery { source, target, mode, window: None }
    }

    pub fn within(mut self, lo: usize, hi: usize) -> Self {
        self.window = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassageResult {
    pub value: f64,
    /// An optimal path, source end first.
    pub path: Vec<usize>,
}

/// Single-search distances plus the deterministic predecessor tree.
///
/// A vertex's predecessor is the smallest-id neighbor that was settled before it
/// and realizes its distance, so the tree, and every path read off it, depends
/// only on the field.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    dist: Vec<f64>,
    pred: Vec<u32>,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[inline]
fn weight(field: &WeightField, e: usize, mode: Mode) -> f64 {
    match mode {
        Mode::Bernoulli => field.t(e) as f64,
        Mode::General => field.tau(e),
    }
}

impl ShortestPaths {
    /// Distances from `sources`, 0-1 BFS in Bernoulli mode and Dijkstra otherwise.
    pub fn compute(graph: &WedgeGraph, field: &WeightField, sources: &[usize], mode: Mode, window: Option<(usize, usize)>) -> Self {
        let nv = graph.num_vertices();
        let allowed = |v: usize| match window {
            Some((lo, hi)) => (lo..=hi).contains(&graph.coords(v).0),
            None => true,
        };
        let mut dist = vec![f64::INFINITY; nv];
        let mut pred = vec![NO_PRED; nv];
        let mut settled = vec![false; nv];
        let mut is_source = vec![false; nv];
        for &s in sources {
            is_source[s] = true;
        }

        let settle = |v: usize, dist: &[f64], settled: &mut [bool], pred: &mut [u32]| {
            settled[v] = true;
            if is_source[v] {
                return;
            }
            let mut best = NO_PRED;
            graph.for_each_neighbor(v, |u, e| {
                if settled[u] && u != v && dist[u] + weight(field, e, mode) == dist[v] && (u as u32) < best {
                    best = u as u32;
                }
            });
            pred[v] = best;
        };

        match mode {
            Mode::Bernoulli => {
                let mut deque = VecDeque::new();
                for &s in sources {
                    if allowed(s) {
                        dist[s] = 0.0;
                        deque.push_back(s);
                    }
                }
                while let Some(v) = deque.pop_front() {
                    if settled[v] {
                        continue;
                    }
                    settle(v, &dist, &mut settled, &mut pred);
                    let d = dist[v];
                    graph.for_each_neighbor(v, |w, e| {
                        if !allowed(w) {
                            return;
                        }
                        let t = field.t(e);
                        let nd = d + t as f64;
                        if nd < dist[w] {
                            dist[w] = nd;
                            if t == 0 {
                                deque.push_front(w);
                            } else {
                                deque.push_back(w);
                            }
                        }
                    });
                }
            }
            Mode::General => {
                let mut heap = BinaryHeap::new();
                for &s in sources {
                    if allowed(s) {
                        dist[s] = 0.0;
                        heap.push(HeapItem(0.0, s));
                    }
                }
                while let Some(HeapItem(d, v)) = heap.pop() {
                    if settled[v] || d > dist[v] {
                        continue;
                    }
                    settle(v, &dist, &mut settled, &mut pred);
                    graph.for_each_neighbor(v, |w, e| {
                        if !allowed(w) {
                            return;
                        }
                        let nd = d + field.tau(e);
                        if nd < dist[w] {
                            dist[w] = nd;
                            heap.push(HeapItem(nd, w));
                        }
                    });
                }
            }
        }
        ShortestPaths { dist, pred }
    }

    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Closest vertex of `targets`, smallest id among ties.
    pub fn best_in(&self, targets: impl IntoIterator<Item = usize>) -> Option<(usize, f64)> {
        targets
            .into_iter()
            .filter(|&v| self.dist[v].is_finite())
            .min_by(|&a, &b| self.dist[a].total_cmp(&self.dist[b]).then(a.cmp(&b)))
            .map(|v| (v, self.dist[v]))
    }

    /// Path from the source set to `v`, source end first.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while self.pred[cur] != NO_PRED {
            cur = self.pred[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Passage time `T(source, target)` together with one optimal path.
pub fn passage_time(graph: &WedgeGraph, field: &WeightField, query: &PassageQuery) -> Result<PassageResult, FppError> {
    let sources = query.source.resolve(graph)?;
    let targets = query.target.resolve(graph)?;
    let sp = ShortestPaths::compute(graph, field, &sources, query.mode, query.window);
    let (v, value) = sp.best_in(targets).ok_or(FppError::Disconnected)?;
    Ok(PassageResult { value, path: sp.path_to(v) })
}

/// `T(0, P(r))` for every `0 <= r <= n` from a single search out of the origin.
///
/// A path from the origin first meets `P(r)` after moving only through columns
/// `< r`, which are the same in `G_f(r)` and in the larger graph, so the values
/// equal the passage times in the truncated wedges.
pub fn line_passage_times(graph: &WedgeGraph, field: &WeightField, mode: Mode) -> Vec<f64> {
    let sp = ShortestPaths::compute(graph, field, &[0], mode, None);
    (0..=graph.n())
        .map(|r| graph.line(r).map(|v| sp.dist(v)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Sum of `tau_e` along a vertex path.
pub fn path_weight(graph: &WedgeGraph, field: &WeightField, path: &[usize], mode: Mode) -> f64 {
    path.windows(2)
        .map(|w| {
            let mut edge = None;
            graph.for_each_neighbor(w[0], |u, e| {
                if u == w[1] {
                    edge = Some(e);
                }
            });
            weight(field, edge.expect("consecutive path vertices are adjacent"), mode)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use randomness::WeightModel;
    use wedge::WedgeFunction;

    #[test]
    fn one_edge_wedge() {
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 0.0).unwrap(), 1).unwrap();
        assert_eq!(g.num_edges(), 1);
        let f = WeightField::from_bits(&WeightModel::constant(0.5), vec![1]);
        let q = PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(1), Mode::Bernoulli);
        let r = passage_time(&g, &f, &q).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.path, vec![0, 1]);
    }

    #[test]
    fn all_open_is_free() {
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 1.0).unwrap(), 40).unwrap();
        let f = WeightField::sample(&WeightModel::constant(1.0), &g, 1, 1);
        assert!(line_passage_times(&g, &f, Mode::Bernoulli).iter().all(|&t| t == 0.0));
    }

    #[test]
    fn tie_break_prefers_small_ids() {
        // All closed: every monotone path to P(n) along the bottom row is optimal,
        // and the tree must pick the straight bottom path.
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 0.0).unwrap(), 12).unwrap();
        let f = WeightField::sample(&WeightModel::constant(0.0), &g, 1, 1);
        let r = passage_time(&g, &f, &PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(12), Mode::Bernoulli)).unwrap();
        assert_eq!(r.value, 12.0);
        let ys: Vec<usize> = r.path.iter().map(|&v| g.coords(v).1).collect();
        assert!(ys.iter().all(|&y| y == 0));
    }

    #[test]
    fn sources_outside_the_window_are_ignored() {
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 0.0).unwrap(), 20).unwrap();
        let f = WeightField::sample(&WeightModel::constant(0.5), &g, 4, 4);
        let q = PassageQuery::new(Endpoint::Line(5), Endpoint::Line(8), Mode::Bernoulli).within(7, 9);
        assert_eq!(passage_time(&g, &f, &q), Err(FppError::Disconnected));
        let inside = PassageQuery::new(Endpoint::Line(7), Endpoint::Line(9), Mode::Bernoulli).within(7, 9);
        assert!(passage_time(&g, &f, &inside).unwrap().value <= 2.0);
    }
}
