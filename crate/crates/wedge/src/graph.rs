use serde::{Deserialize, Serialize};

use crate::{WedgeError, WedgeFunction};

/// Default cap on the number of wedge vertices (about 0.5 GB of graph storage).
pub const DEFAULT_MAX_VERTICES: u64 = 40_000_000;

/// Orientation of a lattice edge, named by the step from its lower-left endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeDir {
    Right,
    Up,
}

/// Geometric key of the lattice edge from `(x, y)` in direction `dir`.
///
/// Keys depend only on the position in Z², so two wedges of different width
/// see the same key (and hence the same random weight) on their shared edges.
pub fn edge_key(x: i64, y: i64, dir: EdgeDir) -> u64 {
    let zig = |v: i64| ((v << 1) ^ (v >> 63)) as u64;
    (zig(x) << 33) ^ (zig(y) << 1) ^ (dir == EdgeDir::Up) as u64
}

/// A dual vertex `(x + 1/2, y + 1/2)`, stored by its integer corner `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualPoint {
    pub x: i64,
    pub y: i64,
}

/// Finite wedge graph `G_f(n)`.
///
/// Vertices are numbered column by column (increasing `x1`, then `x2`). Edges are
/// numbered per column: first the `h(k)+1` rightward edges leaving column `k`,
/// then the `h(k)` upward edges inside it.
#[derive(Debug, Clone)]
pub struct WedgeGraph {
    n: usize,
    f: WedgeFunction,
    heights: Vec<u32>,
    voff: Vec<usize>,
    eoff: Vec<usize>,
    col: Vec<u32>,
    highest_path: Vec<(u32, u32)>,
    top: Vec<Vec<DualPoint>>,
    bottom: Vec<DualPoint>,
}

/// JSON shape used to dump a wedge for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub n: usize,
    pub f: WedgeFunction,
    pub columns: Vec<u32>,
    pub highest_path: Vec<[u32; 2]>,
}

impl WedgeGraph {
    pub fn build(f: &WedgeFunction, n: usize) -> Result<Self, WedgeError> {
        Self::build_with_cap(f, n, DEFAULT_MAX_VERTICES)
    }

    pub fn build_with_cap(f: &WedgeFunction, n: usize, max_vertices: u64) -> Result<Self, WedgeError> {
        f.validate()?;
        if n == 0 {
            return Err(WedgeError::InvalidParameter("wedge width n must be at least 1".into()));
        }
        if n as u64 + 1 > max_vertices {
            return Err(WedgeError::Resource { vertices: n as u64 + 1, cap: max_vertices });
        }
        let mut heights = Vec::with_capacity(n + 1);
        let mut total: u64 = 0;
        for k in 0..=n {
            let h = f.floor_at(k as u64);
            total += h + 1;
            if total > max_vertices || h > u32::MAX as u64 / 2 {
                return Err(WedgeError::Resource { vertices: total, cap: max_vertices });
            }
            heights.push(h as u32);
        }

        let mut voff = Vec::with_capacity(n + 2);
        let mut eoff = Vec::with_capacity(n + 2);
        let (mut v, mut e) = (0usize, 0usize);
        for (k, &h) in heights.iter().enumerate() {
            voff.push(v);
            eoff.push(e);
            v += h as usize + 1;
            e += h as usize + if k < n { h as usize + 1 } else { 0 };
        }
        voff.push(v);
        eoff.push(e);

        let mut col = Vec::with_capacity(v);
        for (k, &h) in heights.iter().enumerate() {
            col.extend(std::iter::repeat_n(k as u32, h as usize + 1));
        }

        let highest_path = highest_path_from_levels(f, &heights)?;

        let top_height = heights[n] as usize;
        let mut top = vec![Vec::new(); top_height + 1];
        for k in 0..n {
            let lo = heights[k];
            let hi = heights[k].max(heights[k + 1].saturating_sub(1));
            for y in lo..=hi {
                top[y as usize].push(DualPoint { x: k as i64, y: y as i64 });
            }
        }
        let bottom = (0..n as i64).map(|x| DualPoint { x, y: -1 }).collect();

        Ok(WedgeGraph { n, f: f.clone(), heights, voff, eoff, col, highest_path, top, bottom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn function(&self) -> &WedgeFunction {
        &self.f
    }

    /// `floor(f(k))` for `0 <= k <= n`.
    pub fn height(&self, k: usize) -> u32 {
        self.heights[k]
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn num_vertices(&self) -> usize {
        self.voff[self.n + 1]
    }

    pub fn num_edges(&self) -> usize {
        self.eoff[self.n + 1]
    }

    pub fn vertex(&self, x: usize, y: usize) -> Option<usize> {
        (x <= self.n && y <= self.heights[x] as usize).then(|| self.voff[x] + y)
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        let x = self.col[v] as usize;
        (x, v - self.voff[x])
    }

    /// Vertex ids of the vertical line `P(r)` inside the wedge (a contiguous range).
    pub fn line(&self, r: usize) -> std::ops::Range<usize> {
        self.voff[r]..self.voff[r + 1]
    }

    /// Vertex ids of all columns `lo..=hi`.
    pub fn columns(&self, lo: usize, hi: usize) -> std::ops::Range<usize> {
        self.voff[lo]..self.voff[hi + 1]
    }

    fn right_count(&self, x: usize) -> usize {
        if x < self.n {
            self.heights[x] as usize + 1
        } else {
            0
        }
    }

    /// Calls `visit(neighbor, edge)` for every neighbor of `v`.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut visit: impl FnMut(usize, usize)) {
        let x = self.col[v] as usize;
        let y = v - self.voff[x];
        let h = self.heights[x] as usize;
        let base = self.eoff[x];
        if x < self.n {
            visit(self.voff[x + 1] + y, base + y);
        }
        if x > 0 && y <= self.heights[x - 1] as usize {
            visit(self.voff[x - 1] + y, self.eoff[x - 1] + y);
        }
        let up = base + self.right_count(x);
        if y < h {
            visit(v + 1, up + y);
        }
        if y > 0 {
            visit(v - 1, up + y - 1);
        }
    }

    /// Position of edge `e`: its lower-left endpoint and direction.
    pub fn edge(&self, e: usize) -> (usize, usize, EdgeDir) {
        let x = self.eoff.partition_point(|&o| o <= e) - 1;
        let local = e - self.eoff[x];
        let right = self.right_count(x);
        if local < right {
            (x, local, EdgeDir::Right)
        } else {
            (x, local - right, EdgeDir::Up)
        }
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let (x, y, dir) = self.edge(e);
        let v = self.voff[x] + y;
        match dir {
            EdgeDir::Right => (v, self.voff[x + 1] + y),
            EdgeDir::Up => (v, v + 1),
        }
    }

    /// Index of the edge from `(x, y)` in direction `dir`, if it belongs to the wedge.
    pub fn edge_index(&self, x: usize, y: usize, dir: EdgeDir) -> Option<usize> {
        if x > self.n {
            return None;
        }
        let h = self.heights[x] as usize;
        match dir {
            EdgeDir::Right => (x < self.n && y <= h).then(|| self.eoff[x] + y),
            EdgeDir::Up => (y < h).then(|| self.eoff[x] + self.right_count(x) + y),
        }
    }

    /// Iterates `(edge, x, y, dir)` in edge-index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize, EdgeDir)> + '_ {
        (0..=self.n).flat_map(move |x| {
            let h = self.heights[x] as usize;
            let base = self.eoff[x];
            let right = self.right_count(x);
            let r = (0..right).map(move |y| (base + y, x, y, EdgeDir::Right));
            let u = (0..h).map(move |y| (base + right + y, x, y, EdgeDir::Up));
            r.chain(u)
        })
    }

    /// Geometric key of edge `e` (see [`edge_key`]).
    pub fn key_of(&self, e: usize) -> u64 {
        let (x, y, dir) = self.edge(e);
        edge_key(x as i64, y as i64, dir)
    }

    /// Highest path from `(0,0)` to `(n, floor f(n))`, right/up steps only.
    pub fn highest_path(&self) -> &[(u32, u32)] {
        &self.highest_path
    }

    /// Dual vertices of `H*(n; j)` at height `j + 1/2`.
    pub fn top_boundary(&self, j: usize) -> &[DualPoint] {
        self.top.get(j).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// All levels of the top dual boundary, indexed by `j`.
    pub fn top_levels(&self) -> &[Vec<DualPoint>] {
        &self.top
    }

    /// `L*(n) = {(k - 1/2, -1/2) : 1 <= k <= n}`.
    pub fn bottom_boundary(&self) -> &[DualPoint] {
        &self.bottom
    }

    /// `#H*(n; j)` from the levels `ell_j`, without looking at the geometric sets.
    pub fn count_top_boundary(&self, j: u64) -> Result<u64, WedgeError> {
        let top = self.heights[self.n] as u64;
        if j > top {
            return Ok(0);
        }
        let ell_j = self.f.level(j)?.ell;
        if j == top {
            return Ok(self.n as u64 - ell_j);
        }
        let ell_next = self.f.level(j + 1)?.ell;
        Ok((ell_next - ell_j).max(1))
    }

    pub fn export(&self) -> GraphExport {
        GraphExport {
            n: self.n,
            f: self.f.clone(),
            columns: self.heights.clone(),
            highest_path: self.highest_path.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

/// Walks the levels: from `(ell_j, j)` go right to `(ell_{j+1}, j)`, then up.
fn highest_path_from_levels(f: &WedgeFunction, heights: &[u32]) -> Result<Vec<(u32, u32)>, WedgeError> {
    let n = heights.len() - 1;
    let top = heights[n];
    let mut path = vec![(0u32, 0u32)];
    let (mut x, mut y) = (0u32, 0u32);
    loop {
        let target = if y < top { f.level(y as u64 + 1)?.ell.min(n as u64) as u32 } else { n as u32 };
        while x < target {
            x += 1;
            path.push((x, y));
        }
        if y == top {
            break;
        }
        let climb = heights[x as usize];
        while y < climb {
            y += 1;
            path.push((x, y));
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(a: f64, b: f64, n: usize) -> WedgeGraph {
        WedgeGraph::build(&WedgeFunction::log_log_log(a, b).unwrap(), n).unwrap()
    }

    #[test]
    fn one_column_wedge() {
        let g = graph(1.0, 0.0, 1);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.coords(1), (1, 0));
        assert_eq!(g.highest_path(), &[(0, 0), (1, 0)]);
    }

    #[test]
    fn top_boundary_sizes_at_n_10() {
        let g = graph(1.0, 0.0, 10);
        let sizes: Vec<usize> = (0..4).map(|j| g.top_boundary(j).len()).collect();
        assert_eq!(sizes, vec![2, 5, 3, 0]);
        let formula: Vec<u64> = (0..4).map(|j| g.count_top_boundary(j).unwrap()).collect();
        assert_eq!(formula, vec![2, 5, 3, 0]);
        assert_eq!(g.bottom_boundary().len(), 10);
        assert_eq!(g.bottom_boundary()[0], DualPoint { x: 0, y: -1 });
    }

    #[test]
    fn sharp_rise_gives_repeated_level() {
        // f(1) = 2.5 already, so ell_1 = ell_2 = 1.
        let f = WedgeFunction::Custom { values: vec![0.0, 2.5, 3.2, 3.9] };
        assert_eq!(f.level(1).unwrap().ell, 1);
        assert_eq!(f.level(2).unwrap().ell, 1);
        let g = WedgeGraph::build(&f, 3).unwrap();
        assert_eq!(g.top_boundary(1).len(), 1);
        assert_eq!(g.top_boundary(1)[0], DualPoint { x: 0, y: 1 });
        assert_eq!(g.count_top_boundary(1).unwrap(), 1);
    }

    #[test]
    fn edge_indexing_round_trips() {
        let g = graph(1.0, 1.0, 40);
        let mut seen = 0;
        for (e, x, y, dir) in g.edges() {
            assert_eq!(g.edge(e), (x, y, dir));
            assert_eq!(g.edge_index(x, y, dir), Some(e));
            seen += 1;
        }
        assert_eq!(seen, g.num_edges());
        let mut degree_sum = 0;
        for v in 0..g.num_vertices() {
            g.for_each_neighbor(v, |w, e| {
                let (p, q) = g.edge_endpoints(e);
                assert!((p, q) == (v, w) || (p, q) == (w, v));
                degree_sum += 1;
            });
        }
        assert_eq!(degree_sum, 2 * g.num_edges());
    }

    #[test]
    fn memory_cap_is_a_resource_error() {
        let f = WedgeFunction::log_log_log(1.0, 0.0).unwrap();
        assert!(matches!(
            WedgeGraph::build_with_cap(&f, 1000, 500),
            Err(WedgeError::Resource { .. })
        ));
    }

    #[test]
    fn export_shape() {
        let g = graph(1.0, 0.0, 3);
        let json = serde_json::to_value(g.export()).unwrap();
        assert_eq!(json["columns"], serde_json::json!([0, 0, 1, 1]));
        assert_eq!(json["f"]["kind"], "log_log_log");
        assert_eq!(json["highest_path"][0], serde_json::json!([0, 0]));
    }

    #[test]
    fn edge_keys_are_distinct_nearby() {
        let mut keys = std::collections::HashSet::new();
        for x in -20..20 {
            for y in -20..20 {
                assert!(keys.insert(edge_key(x, y, EdgeDir::Right)));
                assert!(keys.insert(edge_key(x, y, EdgeDir::Up)));
            }
        }
    }
}
