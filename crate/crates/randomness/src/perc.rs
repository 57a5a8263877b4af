use wedge::{edge_key, EdgeDir};

use crate::counter::{keyed_uniform, Lane};

/// Bernoulli bond percolation evaluated edge by edge from the counter RNG.
///
/// Here "open" means `omega(e) = 1`, which happens with probability `p_open`.
/// (In the FPP model the corresponding event is `t_e = 0`.)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LazyBernoulli {
    pub p_open: f64,
    pub seed: u64,
    pub stream: u64,
}

impl LazyBernoulli {
    pub fn new(p_open: f64, seed: u64, stream: u64) -> Self {
        LazyBernoulli { p_open, seed, stream }
    }

    /// Whether the edge from `(x, y)` in direction `dir` is open.
    #[inline]
    pub fn open(&self, x: i64, y: i64, dir: EdgeDir) -> bool {
        keyed_uniform(self.seed, self.stream, edge_key(x, y, dir), Lane::Bernoulli) < self.p_open
    }
}

/// Dense percolation configuration on the rectangle `[x0, x0+w] x [y0, y0+h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PercConfig {
    pub x0: i64,
    pub y0: i64,
    pub w: usize,
    pub h: usize,
    pub p_open: f64,
    omega: Vec<u8>,
}

impl PercConfig {
    /// Samples `([0,w] x [0,h]) ∩ Z²`.
    pub fn sample_rectangle(w: usize, h: usize, p_open: f64, seed: u64, stream: u64) -> Self {
        Self::sample_at(0, 0, w, h, p_open, seed, stream)
    }

    /// Samples a rectangle with lower-left corner `(x0, y0)`.
    pub fn sample_at(x0: i64, y0: i64, w: usize, h: usize, p_open: f64, seed: u64, stream: u64) -> Self {
        let lazy = LazyBernoulli::new(p_open, seed, stream);
        let mut cfg = PercConfig { x0, y0, w, h, p_open, omega: Vec::new() };
        let mut omega = vec![0u8; cfg.num_edges()];
        for (idx, x, y, dir) in cfg.edge_list() {
            omega[idx] = lazy.open(x0 + x as i64, y0 + y as i64, dir) as u8;
        }
        cfg.omega = omega;
        cfg
    }

    /// Configuration with prescribed bits, in [`edge_list`](Self::edge_list) order.
    pub fn from_bits(w: usize, h: usize, omega: Vec<u8>) -> Self {
        let cfg = PercConfig { x0: 0, y0: 0, w, h, p_open: f64::NAN, omega: Vec::new() };
        assert_eq!(omega.len(), cfg.num_edges());
        PercConfig { omega, ..cfg }
    }

    /// Horizontal edges `(w)(h+1)` followed by vertical edges `(w+1)h`.
    pub fn num_edges(&self) -> usize {
        self.w * (self.h + 1) + (self.w + 1) * self.h
    }

    pub fn num_vertices(&self) -> usize {
        (self.w + 1) * (self.h + 1)
    }

    /// Local vertex id of `(x, y)` relative to the corner.
    #[inline]
    pub fn vertex(&self, x: usize, y: usize) -> usize {
        y * (self.w + 1) + x
    }

    #[inline]
    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % (self.w + 1), v / (self.w + 1))
    }

    #[inline]
    pub fn edge_index(&self, x: usize, y: usize, dir: EdgeDir) -> usize {
        match dir {
            EdgeDir::Right => y * self.w + x,
            EdgeDir::Up => self.w * (self.h + 1) + x * self.h + y,
        }
    }

    /// `(index, x, y, dir)` for every edge, in index order, local coordinates.
    pub fn edge_list(&self) -> Vec<(usize, usize, usize, EdgeDir)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for y in 0..=self.h {
            for x in 0..self.w {
                out.push((self.edge_index(x, y, EdgeDir::Right), x, y, EdgeDir::Right));
            }
        }
        for x in 0..=self.w {
            for y in 0..self.h {
                out.push((self.edge_index(x, y, EdgeDir::Up), x, y, EdgeDir::Up));
            }
        }
        out
    }

    #[inline]
    pub fn is_open(&self, idx: usize) -> bool {
        self.omega[idx] == 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.omega
    }

    /// Calls `visit(neighbor, edge)` for the neighbors of local vertex `v`.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut visit: impl FnMut(usize, usize)) {
        let (x, y) = self.coords(v);
        if x < self.w {
            visit(v + 1, self.edge_index(x, y, EdgeDir::Right));
        }
        if x > 0 {
            visit(v - 1, self.edge_index(x - 1, y, EdgeDir::Right));
        }
        if y < self.h {
            visit(v + self.w + 1, self.edge_index(x, y, EdgeDir::Up));
        }
        if y > 0 {
            visit(v - self.w - 1, self.edge_index(x, y - 1, EdgeDir::Up));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_rectangles() {
        let closed = PercConfig::sample_rectangle(10, 7, 0.0, 1, 1);
        assert!(closed.bits().iter().all(|&b| b == 0));
        let open = PercConfig::sample_rectangle(10, 7, 1.0, 1, 1);
        assert!(open.bits().iter().all(|&b| b == 1));
        assert_eq!(open.num_edges(), 10 * 8 + 11 * 7);
    }

    #[test]
    fn different_seeds_give_different_fields() {
        let a = PercConfig::sample_rectangle(100, 100, 0.5, 1, 0);
        let b = PercConfig::sample_rectangle(100, 100, 0.5, 2, 0);
        assert_ne!(a.bits(), b.bits());
    }

    #[test]
    fn dense_matches_lazy() {
        let cfg = PercConfig::sample_at(-5, 3, 12, 9, 0.4, 77, 2);
        let lazy = LazyBernoulli::new(0.4, 77, 2);
        for (idx, x, y, dir) in cfg.edge_list() {
            assert_eq!(cfg.is_open(idx), lazy.open(x as i64 - 5, y as i64 + 3, dir));
        }
    }

    #[test]
    fn neighbor_edges_are_consistent() {
        let cfg = PercConfig::sample_rectangle(4, 3, 0.5, 0, 0);
        let mut count = vec![0; cfg.num_edges()];
        for v in 0..cfg.num_vertices() {
            cfg.for_each_neighbor(v, |_, e| count[e] += 1);
        }
        assert!(count.iter().all(|&c| c == 2));
    }
}
