use serde::{Deserialize, Serialize};

use crate::StatsError;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Compensated sum; exact for integer-valued inputs of moderate size.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Mean, unbiased variance, skewness and a 95% normal CI for the mean.
///
/// Samples are sorted before accumulation, so the result does not depend on the
/// order in which replicas finished.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub var: f64,
    pub skew: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Summary {
    pub fn from_samples(samples: &[f64]) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::TooFewSamples { needed: 1, got: 0 });
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mean = neumaier_sum(sorted.iter().copied()) / n;
        let (var, skew) = if sorted.len() > 1 {
            let m2 = neumaier_sum(sorted.iter().map(|x| (x - mean).powi(2)));
            let m3 = neumaier_sum(sorted.iter().map(|x| (x - mean).powi(3)));
            let var = m2 / (n - 1.0);
            let pop = m2 / n;
            let skew = if pop > 0.0 { (m3 / n) / pop.powf(1.5) } else { 0.0 };
            (var, skew)
        } else {
            (0.0, 0.0)
        };
        let half = Z95 * (var / n).sqrt();
        Ok(Summary { count: sorted.len(), mean, var, skew, ci_low: mean - half, ci_high: mean + half })
    }

    pub fn std_err(&self) -> f64 {
        (self.var / self.count as f64).sqrt()
    }
}
