use randomness::LazyBernoulli;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wedge::EdgeDir;

use crate::estimate::{ConnectivityCurve, Estimate, Quantity};
use crate::PercError;

/// Axis-aligned vertex box `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeBox {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_lo: i64,
    pub y_hi: i64,
}

impl ProbeBox {
    /// `[-w, w] x [-h, h]`.
    pub fn centered(w: i64, h: i64) -> Self {
        ProbeBox { x_lo: -w, x_hi: w, y_lo: -h, y_hi: h }
    }

    /// Default truncation for connections at distance `n`: `[-n, n] x [-3n, 3n]`.
    pub fn for_n(n: usize) -> Self {
        Self::centered(n as i64, 3 * n as i64)
    }

    /// The slab `S(n)` cut to `|x2| <= 3n`.
    pub fn slab(n: usize) -> Self {
        ProbeBox { x_lo: 0, x_hi: n as i64, y_lo: -3 * n as i64, y_hi: 3 * n as i64 }
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }

    fn size(&self) -> usize {
        ((self.x_hi - self.x_lo + 1) * (self.y_hi - self.y_lo + 1)) as usize
    }

    #[inline]
    fn index(&self, x: i64, y: i64) -> usize {
        ((x - self.x_lo) * (self.y_hi - self.y_lo + 1) + (y - self.y_lo)) as usize
    }
}

/// Reusable depth-first cluster explorer; visited marks are generation stamps so
/// nothing is cleared between samples.
#[derive(Debug, Clone)]
pub struct Explorer {
    bx: ProbeBox,
    stamp: Vec<u32>,
    generation: u32,
    stack: Vec<(i64, i64)>,
}

impl Explorer {
    pub fn new(bx: ProbeBox) -> Self {
        Explorer { bx, stamp: vec![0; bx.size()], generation: 0, stack: Vec::new() }
    }

    /// Calls `visit` once for every vertex of the open cluster of `origin` inside the box.
    pub fn explore(&mut self, lazy: &LazyBernoulli, origin: (i64, i64), mut visit: impl FnMut(i64, i64)) {
        if self.generation == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 0;
        }
        self.generation += 1;
        let g = self.generation;
        let bx = self.bx;
        assert!(bx.contains(origin.0, origin.1));
        self.stamp[bx.index(origin.0, origin.1)] = g;
        self.stack.push(origin);
        while let Some((x, y)) = self.stack.pop() {
            visit(x, y);
            let steps = [
                (x + 1, y, lazy.open(x, y, EdgeDir::Right)),
                (x - 1, y, lazy.open(x - 1, y, EdgeDir::Right)),
                (x, y + 1, lazy.open(x, y, EdgeDir::Up)),
                (x, y - 1, lazy.open(x, y - 1, EdgeDir::Up)),
            ];
            for (nx, ny, open) in steps {
                if open && bx.contains(nx, ny) {
                    let k = bx.index(nx, ny);
                    if self.stamp[k] != g {
                        self.stamp[k] = g;
                        self.stack.push((nx, ny));
                    }
                }
            }
        }
    }
}

/// Raw counts behind the point-to-point, point-to-plane, point-to-box and `G_n` curves.
///
/// Index `n` of each vector refers to distance `n`; index 0 is unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCounts {
    pub p: f64,
    pub n_max: usize,
    pub samples: u64,
    pub bx: ProbeBox,
    pub point: Vec<u64>,
    pub plane: Vec<u64>,
    pub boxed: Vec<u64>,
    pub g_sum: Vec<u64>,
    pub g_sq: Vec<u64>,
}

impl ClusterCounts {
    fn empty(p: f64, n_max: usize, bx: ProbeBox) -> Self {
        let z = vec![0u64; n_max + 1];
        ClusterCounts {
            p,
            n_max,
            samples: 0,
            bx,
            point: z.clone(),
            plane: z.clone(),
            boxed: z.clone(),
            g_sum: z.clone(),
            g_sq: z,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        for (a, b) in [
            (&mut self.point, &other.point),
            (&mut self.plane, &other.plane),
            (&mut self.boxed, &other.boxed),
            (&mut self.g_sum, &other.g_sum),
            (&mut self.g_sq, &other.g_sq),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }

    pub fn curve(&self, quantity: Quantity) -> ConnectivityCurve {
        let points = (1..=self.n_max)
            .map(|n| match quantity {
                Quantity::PointToPoint => Estimate::proportion(n, self.point[n], self.samples),
                Quantity::PointToPlane => Estimate::proportion(n, self.plane[n], self.samples),
                Quantity::PointToBox => Estimate::proportion(n, self.boxed[n], self.samples),
                Quantity::Gn => Estimate::mean(n, self.g_sum[n], self.g_sq[n], self.samples),
                Quantity::Hn | Quantity::RectCrossing => panic!("{quantity:?} is not a cluster-count curve"),
            })
            .collect();
        ConnectivityCurve { quantity, p: self.p, points }
    }
}

fn check_p(p: f64) -> Result<(), PercError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(PercError::InvalidParameter(format!("p = {p} outside [0, 1]")))
    }
}

/// Explores the cluster of the origin once per sample inside `bx` and records,
/// for every `1 <= n <= n_max`, whether it reaches `(n, 0)`, the line `x1 = n`,
/// and `∂B(n)`, and how many vertices it has on `x1 = n`.
///
/// Sample `k` uses stream `k` of `seed`, so results do not depend on threading.
pub fn cluster_counts_in(p: f64, n_max: usize, bx: ProbeBox, samples: u64, seed: u64) -> Result<ClusterCounts, PercError> {
    check_p(p)?;
    if n_max == 0 || bx.x_hi < n_max as i64 || !bx.contains(0, 0) {
        return Err(PercError::InvalidParameter(format!("box {bx:?} cannot reach distance {n_max}")));
    }
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || (Explorer::new(bx), ClusterCounts::empty(p, n_max, bx), vec![0u64; n_max + 1]),
            |(mut ex, mut acc, mut col), k| {
                let lazy = LazyBernoulli::new(p, seed, k);
                col.iter_mut().for_each(|c| *c = 0);
                let (mut max_x, mut max_inf) = (0i64, 0i64);
                ex.explore(&lazy, (0, 0), |x, y| {
                    max_x = max_x.max(x);
                    max_inf = max_inf.max(x.abs()).max(y.abs());
                    if x >= 1 && x as usize <= n_max {
                        col[x as usize] += 1;
                        if y == 0 {
                            acc.point[x as usize] += 1;
                        }
                    }
                });
                for n in 1..=n_max {
                    acc.plane[n] += (max_x >= n as i64) as u64;
                    acc.boxed[n] += (max_inf >= n as i64) as u64;
                    acc.g_sum[n] += col[n];
                    acc.g_sq[n] += col[n] * col[n];
                }
                acc.samples += 1;
                (ex, acc, col)
            },
        )
        .map(|(_, acc, _)| acc)
        .reduce(|| ClusterCounts::empty(p, n_max, bx), ClusterCounts::merge);
    Ok(counts)
}

/// [`cluster_counts_in`] with the default box `[-n_max, n_max] x [-3 n_max, 3 n_max]`.
///
/// Distances `n < n_max` are then truncated more loosely than their own default box,
/// which only reduces the truncation bias.
pub fn cluster_counts(p: f64, n_max: usize, samples: u64, seed: u64) -> Result<ClusterCounts, PercError> {
    cluster_counts_in(p, n_max, ProbeBox::for_n(n_max), samples, seed)
}

/// `P_p(0 <-> P(n))` inside the box `[-n, n] x [-3n, 3n]`.
pub fn estimate_point_to_plane(p: f64, n: usize, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    let c = cluster_counts(p, n, samples, seed)?;
    Ok(Estimate::proportion(n, c.plane[n], samples))
}

/// `P_p(0 <-> ∂B(n))` inside the box `[-n, n] x [-3n, 3n]`.
pub fn estimate_point_to_box(p: f64, n: usize, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    let c = cluster_counts(p, n, samples, seed)?;
    Ok(Estimate::proportion(n, c.boxed[n], samples))
}
