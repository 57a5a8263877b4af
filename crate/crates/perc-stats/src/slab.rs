use randomness::LazyBernoulli;
use rayon::prelude::*;

use crate::cluster::{Explorer, ProbeBox};
use crate::estimate::{ConnectivityCurve, Estimate, Quantity};
use crate::PercError;

/// Whether the cluster of the origin restricted to `bx` meets `x1 = 0` only at the
/// origin and `x1 = n` in exactly one vertex.
pub fn strict_cylinder_event(ex: &mut Explorer, lazy: &LazyBernoulli, n: usize) -> bool {
    let (mut left, mut right) = (0u32, 0u32);
    ex.explore(lazy, (0, 0), |x, _| {
        if x == 0 {
            left += 1;
        }
        if x == n as i64 {
            right += 1;
        }
    });
    left == 1 && right == 1
}

/// `H_n(p)`: the strict-cylinder probability, sampled in the slab `S(n)` cut to `|x2| <= 3n`.
///
/// The events "`C(0)|_{S(n)}` meets `P(n)` exactly at `x`" are disjoint in `x`,
/// so this probability is the sum over `x` of the point-to-point cylinder functions.
pub fn estimate_hn(p: f64, n: usize, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    estimate_hn_in(p, n, ProbeBox::slab(n), samples, seed)
}

/// [`estimate_hn`] in an explicit box (it must lie inside the slab `0 <= x1 <= n`).
pub fn estimate_hn_in(p: f64, n: usize, bx: ProbeBox, samples: u64, seed: u64) -> Result<Estimate, PercError> {
    if n == 0 || bx.x_lo != 0 || bx.x_hi != n as i64 || !bx.contains(0, 0) {
        return Err(PercError::InvalidParameter(format!("box {bx:?} is not a slab of width {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(PercError::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map_init(
            || Explorer::new(bx),
            |ex, k| strict_cylinder_event(ex, &LazyBernoulli::new(p, seed, k), n) as u64,
        )
        .sum();
    Ok(Estimate::proportion(n, hits, samples))
}

pub fn hn_curve(p: f64, ns: &[usize], samples: u64, seed: u64) -> Result<ConnectivityCurve, PercError> {
    let points = ns.iter().map(|&n| estimate_hn(p, n, samples, seed)).collect::<Result<_, _>>()?;
    Ok(ConnectivityCurve { quantity: Quantity::Hn, p, points })
}
