use randomness::{PercConfig, WeightField};
use serde::{Deserialize, Serialize};
use wedge::WedgeGraph;

use crate::dual::{CrossingCount, CrossingKind};
use crate::flow::{FlowNetwork, INF_CAP};
use crate::FppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Positions `lo..=hi` along one side of a rectangle, in local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub side: Side,
    pub lo: usize,
    pub hi: usize,
}

impl Segment {
    pub fn whole(side: Side, cfg: &PercConfig) -> Self {
        let hi = match side {
            Side::Left | Side::Right => cfg.h,
            Side::Bottom | Side::Top => cfg.w,
        };
        Segment { side, lo: 0, hi }
    }

    /// Local `(x, y)` points of the segment.
    pub fn points(&self, cfg: &PercConfig) -> Vec<(usize, usize)> {
        let (w, h) = (cfg.w, cfg.h);
        match self.side {
            Side::Left => (self.lo..=self.hi.min(h)).map(|y| (0, y)).collect(),
            Side::Right => (self.lo..=self.hi.min(h)).map(|y| (w, y)).collect(),
            Side::Bottom => (self.lo..=self.hi.min(w)).map(|x| (x, 0)).collect(),
            Side::Top => (self.lo..=self.hi.min(w)).map(|x| (x, h)).collect(),
        }
    }
}

/// Maximum number of edge-disjoint open paths from `source` to `sink` inside the rectangle.
pub fn open_crossing_count(cfg: &PercConfig, source: &Segment, sink: &Segment) -> Result<CrossingCount, FppError> {
    let src: Vec<usize> = source.points(cfg).into_iter().map(|(x, y)| cfg.vertex(x, y)).collect();
    let dst: Vec<usize> = sink.points(cfg).into_iter().map(|(x, y)| cfg.vertex(x, y)).collect();
    if src.is_empty() || dst.is_empty() {
        return Err(FppError::InvalidQuery("empty segment".into()));
    }
    if src.iter().any(|v| dst.contains(v)) {
        return Err(FppError::InvalidQuery("source and sink segments overlap".into()));
    }
    let nv = cfg.num_vertices();
    let (s, t) = (nv, nv + 1);
    let mut net = FlowNetwork::new(nv + 2);
    for (idx, x, y, dir) in cfg.edge_list() {
        if cfg.is_open(idx) {
            let u = cfg.vertex(x, y);
            let v = match dir {
                wedge::EdgeDir::Right => cfg.vertex(x + 1, y),
                wedge::EdgeDir::Up => cfg.vertex(x, y + 1),
            };
            net.add_undirected(u, v, 1);
        }
    }
    for &v in &src {
        net.add_edge(s, v, INF_CAP);
    }
    for &v in &dst {
        net.add_edge(v, t, INF_CAP);
    }
    let value = net.max_flow(s, t);
    let certificate = net
        .decompose_paths(s, t)
        .into_iter()
        .map(|p| {
            p[1..p.len() - 1]
                .iter()
                .map(|&v| {
                    let (x, y) = cfg.coords(v);
                    (cfg.x0 + x as i64, cfg.y0 + y as i64)
                })
                .collect()
        })
        .collect();
    let kind = match (source.side, sink.side) {
        (Side::Left, Side::Right) if *source == Segment::whole(Side::Left, cfg) && *sink == Segment::whole(Side::Right, cfg) => {
            CrossingKind::OpenLeftRight
        }
        _ => CrossingKind::OpenPointSets,
    };
    Ok(CrossingCount { value, kind, certificate: Some(certificate) })
}

/// `X`: edge-disjoint left-right open crossings of the whole rectangle.
pub fn left_right_crossings(cfg: &PercConfig) -> CrossingCount {
    open_crossing_count(cfg, &Segment::whole(Side::Left, cfg), &Segment::whole(Side::Right, cfg))
        .expect("left and right sides are disjoint for w >= 1")
}

/// Whether the block `{lo <= x1 <= hi}` of the wedge has an open (`t = 0`) path
/// inside it from its top set to the x-axis.
///
/// The top set is the highest vertex of each column of the block.
pub fn top_down_crossing_exists(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> bool {
    top_down_cluster(graph, field, lo, hi).1
}

/// Vertices of the block reachable from its top set by open edges, and whether
/// that cluster touches the x-axis.
pub fn top_down_cluster(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> (Vec<bool>, bool) {
    let hi = hi.min(graph.n());
    let range = graph.columns(lo, hi);
    let base = range.start;
    let mut seen = vec![false; range.len()];
    let mut stack = Vec::new();
    for x in lo..=hi {
        let v = graph.vertex(x, graph.height(x) as usize).unwrap();
        seen[v - base] = true;
        stack.push(v);
    }
    let mut hit = false;
    while let Some(v) = stack.pop() {
        if graph.coords(v).1 == 0 {
            hit = true;
        }
        graph.for_each_neighbor(v, |w, e| {
            if range.contains(&w) && field.t(e) == 0 && !seen[w - base] {
                seen[w - base] = true;
                stack.push(w);
            }
        });
    }
    (seen, hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use randomness::WeightModel;
    use wedge::{EdgeDir, WedgeFunction};

    #[test]
    fn fully_open_rectangle_has_h_plus_one_crossings() {
        for (w, h) in [(1, 1), (5, 3), (8, 8), (3, 10)] {
            let cfg = PercConfig::sample_rectangle(w, h, 1.0, 0, 0);
            assert_eq!(left_right_crossings(&cfg).value, h as u64 + 1);
            let closed = PercConfig::sample_rectangle(w, h, 0.0, 0, 0);
            assert_eq!(left_right_crossings(&closed).value, 0);
        }
    }

    #[test]
    fn degenerate_blocks() {
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 0.0).unwrap(), 30).unwrap();
        let open = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
        let closed = WeightField::sample(&WeightModel::constant(0.0), &g, 0, 0);
        assert!(top_down_crossing_exists(&g, &open, 10, 20));
        assert!(!top_down_crossing_exists(&g, &closed, 10, 20));
    }

    #[test]
    fn staircase_block() {
        // Columns 20..=24 of a wedge with height >= 5 there, one open staircase
        // from (20, h(20)) down-right towards the axis.
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 0.0).unwrap(), 30).unwrap();
        let h = g.height(20) as usize;
        assert!(h >= 5 && g.height(24) as usize == h);
        let mut bits = vec![1u8; g.num_edges()];
        let (mut x, mut y) = (20, h);
        while y > 0 {
            bits[g.edge_index(x, y - 1, EdgeDir::Up).unwrap()] = 0;
            y -= 1;
            if y > 0 && x < 24 {
                bits[g.edge_index(x, y, EdgeDir::Right).unwrap()] = 0;
                x += 1;
            }
        }
        let f = WeightField::from_bits(&WeightModel::constant(0.5), bits);
        assert!(top_down_crossing_exists(&g, &f, 20, 24));
        assert!(!top_down_crossing_exists(&g, &f, 21, 24));
    }
}
