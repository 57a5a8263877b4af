use fpp_core::left_right_crossings;
use randomness::{stream_id, LazyBernoulli, PercConfig};
use rayon::prelude::*;
use wedge::EdgeDir;

use crate::estimate::Estimate;
use crate::PercError;

const LEFT: u8 = 1;
const RIGHT: u8 = 2;

/// Union-find over one row of the sweep plus the labels carried from the row below.
struct Frontier {
    parent: Vec<u32>,
    flags: Vec<u8>,
    label: Vec<u32>,
    label_flags: Vec<u8>,
    remap: Vec<u32>,
}

impl Frontier {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            let g = self.parent[self.parent[v] as usize];
            self.parent[v] = g;
            v = g as usize;
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
            self.flags[lo] |= self.flags[hi];
        }
    }
}

/// Whether `[0, w] x [0, h]` has an open left-right crossing.
///
/// Rows are swept bottom to top keeping only the current row's components, so
/// memory is `O(w)` and the sweep stops at the first row that completes a crossing.
pub fn has_left_right_crossing(lazy: &LazyBernoulli, w: usize, h: u64) -> bool {
    let m = w + 1;
    let mut fr = Frontier {
        parent: vec![0; 2 * m],
        flags: vec![0; 2 * m],
        label: vec![0; m],
        label_flags: vec![0; m],
        remap: vec![u32::MAX; 2 * m],
    };
    for y in 0..=h {
        let y = y as i64;
        for i in 0..2 * m {
            fr.parent[i] = i as u32;
        }
        for i in 0..m {
            fr.flags[i] = fr.label_flags[i];
            fr.flags[m + i] = if i == 0 { LEFT } else { 0 } | if i == w { RIGHT } else { 0 };
        }
        if y > 0 {
            for x in 0..m {
                if lazy.open(x as i64, y - 1, EdgeDir::Up) {
                    let l = fr.label[x] as usize;
                    fr.union(l, m + x);
                }
            }
        }
        for x in 0..w {
            if lazy.open(x as i64, y, EdgeDir::Right) {
                fr.union(m + x, m + x + 1);
            }
        }
        let mut next = 0u32;
        let mut new_flags = vec![0u8; m];
        for x in 0..m {
            let r = fr.find(m + x);
            if fr.flags[r] == LEFT | RIGHT {
                return true;
            }
            if fr.remap[r] == u32::MAX {
                fr.remap[r] = next;
                new_flags[next as usize] = fr.flags[r];
                next += 1;
            }
            fr.label[x] = fr.remap[r];
        }
        for x in 0..m {
            let r = fr.find(m + x);
            fr.remap[r] = u32::MAX;
        }
        fr.label_flags = new_flags;
    }
    false
}

fn check(p: f64, n: usize) -> Result<(), PercError> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(PercError::InvalidParameter(format!("need p in [0,1] and n >= 1, got p={p}, n={n}")));
    }
    Ok(())
}

/// Probability that `[0, n] x [0, h]` has a left-right open crossing.
pub fn estimate_rect_crossing(p: f64, n: usize, h: u64, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    check(p, n)?;
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|k| has_left_right_crossing(&LazyBernoulli::new(p, seed, stream_id(&[n as u64, h, k])), n, h) as u64)
        .sum();
    Ok(Estimate::proportion(n, hits, samples))
}

/// Mean number of edge-disjoint left-right open crossings `X` of `[0, n] x [0, h]`.
pub fn estimate_disjoint_crossings(p: f64, n: usize, h: usize, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    check(p, n)?;
    let (sum, sq) = (0..samples)
        .into_par_iter()
        .map(|k| {
            let cfg = PercConfig::sample_rectangle(n, h, p, seed, stream_id(&[n as u64, h as u64, k]));
            let x = left_right_crossings(&cfg).value;
            (x, x * x)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Estimate::mean(n, sum, sq, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_agrees_with_max_flow() {
        for k in 0..400u64 {
            let (w, h) = (1 + (k % 7) as usize, (k / 7 % 6) as usize);
            let p = 0.3 + 0.05 * (k % 5) as f64;
            let cfg = PercConfig::sample_rectangle(w, h, p, 31, k);
            let lazy = LazyBernoulli::new(p, 31, k);
            assert_eq!(has_left_right_crossing(&lazy, w, h as u64), left_right_crossings(&cfg).value > 0, "w={w} h={h}");
        }
    }

    #[test]
    fn degenerate_p() {
        assert_eq!(estimate_rect_crossing(1.0, 5, 3, 20, 0).unwrap().estimate, 1.0);
        assert_eq!(estimate_rect_crossing(0.0, 5, 3, 20, 0).unwrap().estimate, 0.0);
    }
}
