use serde::{Deserialize, Serialize};

use crate::estimate::Estimate;
use crate::rect::estimate_rect_crossing;
use crate::PercError;

/// Height profile `h(n)` of the rectangles `[0, n] x [0, h(n)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpongeGrowth {
    /// `h = exp(n / (2 xi))`: driver `h e^{-n/xi}` goes to 0.
    Thin,
    /// `h = exp(3n / (2 xi))`: driver goes to infinity.
    Thick,
    /// `h = c exp(n / xi)`: constant driver.
    Balanced { c: f64 },
}

impl SpongeGrowth {
    pub fn height(&self, n: usize, xi: f64) -> u64 {
        let n = n as f64;
        let h = match *self {
            SpongeGrowth::Thin => (n / (2.0 * xi)).exp(),
            SpongeGrowth::Thick => (1.5 * n / xi).exp(),
            SpongeGrowth::Balanced { c } => c * (n / xi).exp(),
        };
        h.round().max(1.0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseVerdict {
    ToZero,
    ToOne,
    Intermediate,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpongeRow {
    pub n: usize,
    pub h: u64,
    /// `h e^{-n / xi_hat}`.
    pub driver: f64,
    pub crossing: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpongeScan {
    pub p: f64,
    pub xi: f64,
    pub growth: SpongeGrowth,
    pub rows: Vec<SpongeRow>,
    /// From the driver alone.
    pub predicted: PhaseVerdict,
    /// From the crossing estimates.
    pub observed: PhaseVerdict,
}

impl SpongeScan {
    /// Three-column CSV `n,driver,p_hat`.
    pub fn to_csv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str("n,driver,p_hat\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.driver, r.crossing.estimate));
        }
        out
    }
}

/// Verdict from a sequence of crossing probabilities.
pub fn observed_verdict(probs: &[f64]) -> PhaseVerdict {
    let (first, last) = match (probs.first(), probs.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return PhaseVerdict::Undetermined,
    };
    if last < 0.1 && last < first {
        PhaseVerdict::ToZero
    } else if last > 0.9 && last > first {
        PhaseVerdict::ToOne
    } else if probs.iter().all(|&q| (0.05..=0.95).contains(&q)) {
        PhaseVerdict::Intermediate
    } else {
        PhaseVerdict::Undetermined
    }
}

/// Verdict from the driver trend: a factor-2 change either way counts as a trend.
pub fn predicted_verdict(drivers: &[f64]) -> PhaseVerdict {
    match (drivers.first(), drivers.last()) {
        (Some(&a), Some(&b)) if b < a / 2.0 => PhaseVerdict::ToZero,
        (Some(&a), Some(&b)) if b > a * 2.0 => PhaseVerdict::ToOne,
        (Some(_), Some(_)) => PhaseVerdict::Intermediate,
        _ => PhaseVerdict::Undetermined,
    }
}

/// Crossing probabilities of `[0, n] x [0, h(n)]` over `n_list`.
///
/// Heights above `max_height` are refused rather than silently capped.
pub fn sponge_phase_scan(
    p: f64,
    xi: f64,
    growth: SpongeGrowth,
    n_list: &[usize],
    samples: u64,
    seed: u64,
    max_height: u64,
) -> Result<SpongeScan, PercError> {
    if !(xi > 0.0) {
        return Err(PercError::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let h = growth.height(n, xi);
        if h > max_height {
            return Err(PercError::InvalidParameter(format!("h({n}) = {h} exceeds the cap {max_height}")));
        }
        let crossing = estimate_rect_crossing(p, n, h, samples, seed)?;
        rows.push(SpongeRow { n, h, driver: h as f64 * (-(n as f64) / xi).exp(), crossing });
    }
    let probs: Vec<f64> = rows.iter().map(|r| r.crossing.estimate).collect();
    let drivers: Vec<f64> = rows.iter().map(|r| r.driver).collect();
    Ok(SpongeScan { p, xi, growth, predicted: predicted_verdict(&drivers), observed: observed_verdict(&probs), rows })
}

/// Constant `c` for which `h = c e^{n_ref / xi}` gives crossing probability near 1/2 at `n_ref`.
///
/// Bisection on `log c`; the crossing probability is monotone in `h`.
pub fn calibrate_balanced_constant(p: f64, xi: f64, n_ref: usize, samples: u64, seed: u64) -> Result<f64, PercError> {
    let (mut lo, mut hi) = ((1e-3f64).ln(), (1e3f64).ln());
    for _ in 0..14 {
        let mid = 0.5 * (lo + hi);
        let h = SpongeGrowth::Balanced { c: mid.exp() }.height(n_ref, xi);
        let est = estimate_rect_crossing(p, n_ref, h, samples, seed)?.estimate;
        if est < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
