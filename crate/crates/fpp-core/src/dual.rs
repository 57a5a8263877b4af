use randomness::WeightField;
use serde::{Deserialize, Serialize};
use wedge::{DualPoint, EdgeDir, WedgeGraph};

use crate::flow::{FlowNetwork, INF_CAP};
use crate::FppError;

/// What a [`CrossingCount`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    /// `Y_n`: closed dual paths from the whole top boundary to the bottom.
    DualTopDown,
    /// `Y_{n,j}`: closed dual paths starting at level `j` of the top boundary.
    DualFromLevel(u32),
    /// `X_n`: open left-right crossings of a rectangle.
    OpenLeftRight,
    /// Open paths between two prescribed vertex segments.
    OpenPointSets,
}

/// Maximum number of edge-disjoint crossings, with the paths realizing it.
///
/// Dual certificates list dual points by their integer corner `(x, y)`, standing
/// for `(x + 1/2, y + 1/2)`. Primal certificates list lattice points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingCount {
    pub value: u64,
    pub kind: CrossingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Vec<(i64, i64)>>>,
}

/// The part of the dual lattice that can carry separating paths for `G_f(r)`.
///
/// Column `k` (`0 <= k < r`) holds dual points `(k, y)` for
/// `-1 <= y <= max(h(k), h(k+1) - 1)`: the bottom point, the interior faces and
/// the top-boundary points. Dual edges are those crossing a primal edge with at
/// least one endpoint strictly left of the line `P(r)`; edges inside `P(r)` never
/// matter for reaching it.
#[derive(Debug, Clone)]
pub struct DualGraph {
    r: usize,
    off: Vec<usize>,
    top: Vec<i64>,
    /// `(dual u, dual v, primal edge)`.
    edges: Vec<(usize, usize, usize)>,
}

impl DualGraph {
    pub fn new(graph: &WedgeGraph, r: usize) -> Result<Self, FppError> {
        if r == 0 || r > graph.n() {
            return Err(FppError::InvalidQuery(format!("line {r} outside 1..={}", graph.n())));
        }
        let h = |k: usize| graph.height(k) as i64;
        let top: Vec<i64> = (0..r).map(|k| h(k).max(h(k + 1) - 1)).collect();
        let mut off = Vec::with_capacity(r + 1);
        let mut total = 0usize;
        for &t in &top {
            off.push(total);
            total += (t + 2) as usize;
        }
        off.push(total);
        let mut dual = DualGraph { r, off, top, edges: Vec::new() };
        for k in 0..r {
            for y in 0..=h(k) {
                let e = graph.edge_index(k, y as usize, EdgeDir::Right).expect("right edge inside wedge");
                let (a, b) = (dual.id(k, y - 1), dual.id(k, y));
                dual.edges.push((a, b, e));
            }
            if k >= 1 {
                for y in 0..h(k) {
                    let e = graph.edge_index(k, y as usize, EdgeDir::Up).expect("up edge inside wedge");
                    let (a, b) = (dual.id(k - 1, y), dual.id(k, y));
                    dual.edges.push((a, b, e));
                }
            }
        }
        Ok(dual)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.off[self.r]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    fn id(&self, k: usize, y: i64) -> usize {
        debug_assert!(y >= -1 && y <= self.top[k]);
        self.off[k] + (y + 1) as usize
    }

    pub fn point(&self, id: usize) -> DualPoint {
        let k = self.off.partition_point(|&o| o <= id) - 1;
        DualPoint { x: k as i64, y: (id - self.off[k]) as i64 - 1 }
    }

    /// `(dual u, dual v, primal edge)` for every dual edge.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    fn sources(&self, graph: &WedgeGraph, level: Option<u32>) -> Vec<usize> {
        let pick = |j: usize| graph.top_boundary(j).iter().filter(|p| (p.x as usize) < self.r);
        match level {
            Some(j) if j > graph.height(self.r) => Vec::new(),
            Some(j) => pick(j as usize).map(|p| self.id(p.x as usize, p.y)).collect(),
            None => (0..=graph.height(self.r) as usize)
                .flat_map(|j| pick(j).map(|p| self.id(p.x as usize, p.y)).collect::<Vec<_>>())
                .collect(),
        }
    }

    /// Max edge-disjoint closed dual paths from the top boundary (or one level of it) to `L*`.
    pub fn count(&self, graph: &WedgeGraph, field: &WeightField, level: Option<u32>, certify: bool) -> CrossingCount {
        let nv = self.num_vertices();
        let (s, t) = (nv, nv + 1);
        let mut net = FlowNetwork::new(nv + 2);
        for &(a, b, e) in &self.edges {
            if field.t(e) == 1 {
                net.add_undirected(a, b, 1);
            }
        }
        for v in self.sources(graph, level) {
            net.add_edge(s, v, INF_CAP);
        }
        for k in 0..self.r {
            net.add_edge(self.id(k, -1), t, INF_CAP);
        }
        let value = net.max_flow(s, t);
        let certificate = certify.then(|| {
            net.decompose_paths(s, t)
                .into_iter()
                .map(|p| {
                    p[1..p.len() - 1]
                        .iter()
                        .map(|&v| {
                            let q = self.point(v);
                            (q.x, q.y)
                        })
                        .collect()
                })
                .collect()
        });
        let kind = match level {
            Some(j) => CrossingKind::DualFromLevel(j),
            None => CrossingKind::DualTopDown,
        };
        CrossingCount { value, kind, certificate }
    }
}

/// `Y_r`: the maximum number of edge-disjoint closed dual paths from `H*(r)` to `L*(r)`.
pub fn dual_separating_count(graph: &WedgeGraph, field: &WeightField, r: usize) -> Result<CrossingCount, FppError> {
    Ok(DualGraph::new(graph, r)?.count(graph, field, None, true))
}

/// `Y_{r,j}`: as [`dual_separating_count`] with sources restricted to `H*(r; j)`.
pub fn dual_level_count(graph: &WedgeGraph, field: &WeightField, r: usize, j: u32) -> Result<CrossingCount, FppError> {
    Ok(DualGraph::new(graph, r)?.count(graph, field, Some(j), true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use randomness::WeightModel;
    use wedge::WedgeFunction;

    fn g(n: usize) -> WedgeGraph {
        WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 0.0).unwrap(), n).unwrap()
    }

    #[test]
    fn every_primal_edge_left_of_the_line_has_one_dual() {
        let graph = g(10);
        let dual = DualGraph::new(&graph, 10).unwrap();
        let inner = graph.edges().filter(|&(_, x, _, dir)| x < 10 || dir == EdgeDir::Right).count();
        assert_eq!(dual.num_edges(), inner);
        for v in 0..dual.num_vertices() {
            let p = dual.point(v);
            assert_eq!(dual.id(p.x as usize, p.y), v);
        }
    }

    #[test]
    fn degenerate_fields() {
        let graph = g(10);
        let open = WeightField::sample(&WeightModel::constant(1.0), &graph, 0, 0);
        assert_eq!(dual_separating_count(&graph, &open, 10).unwrap().value, 0);
        // All closed: every route to P(10) must cross all ten columns of edges.
        let closed = WeightField::sample(&WeightModel::constant(0.0), &graph, 0, 0);
        assert_eq!(dual_separating_count(&graph, &closed, 10).unwrap().value, 10);
        assert_eq!(dual_level_count(&graph, &closed, 10, 3).unwrap().value, 0);
    }

    #[test]
    fn level_counts_when_all_closed() {
        // Heights for a=1, b=0, n=10 are 0,0,1,1,1,1,1,2,2,2,2. With every edge
        // closed each source point contributes one path per dual edge leaving it:
        // (1,0) and (6,1) also have a horizontal dual edge into the taller column.
        let graph = g(10);
        let closed = WeightField::sample(&WeightModel::constant(0.0), &graph, 0, 0);
        let y: Vec<u64> = (0..3).map(|j| dual_level_count(&graph, &closed, 10, j).unwrap().value).collect();
        assert_eq!(y, vec![3, 6, 3]);
        assert!(y.iter().sum::<u64>() >= 10);
    }
}
