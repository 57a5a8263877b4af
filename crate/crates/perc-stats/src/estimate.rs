use mc_stats::{wilson_interval, Z95};
use serde::{Deserialize, Serialize};

/// A Monte Carlo probability (or mean) at one `n`, with a 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    /// Fewer than 10 successes: the Wilson interval is not trusted.
    pub rare: bool,
}

impl Estimate {
    pub fn proportion(n: usize, successes: u64, samples: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, samples, Z95);
        Estimate {
            n,
            estimate: successes as f64 / samples.max(1) as f64,
            ci_low,
            ci_high,
            samples,
            rare: successes < 10,
        }
    }

    /// Mean of a nonnegative count from its first two moments.
    pub fn mean(n: usize, sum: u64, sum_sq: u64, samples: u64) -> Self {
        let m = samples.max(1) as f64;
        let mean = sum as f64 / m;
        let var = if samples > 1 { ((sum_sq as f64) - m * mean * mean).max(0.0) / (m - 1.0) } else { 0.0 };
        let half = Z95 * (var / m).sqrt();
        Estimate { n, estimate: mean, ci_low: (mean - half).max(0.0), ci_high: mean + half, samples, rare: sum < 10 }
    }

    /// Half the interval width.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PointToPoint,
    PointToPlane,
    PointToBox,
    Gn,
    Hn,
    RectCrossing,
}

/// Estimates of one quantity over a range of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityCurve {
    pub quantity: Quantity,
    pub p: f64,
    pub points: Vec<Estimate>,
}

impl ConnectivityCurve {
    pub fn get(&self, n: usize) -> Option<&Estimate> {
        self.points.iter().find(|e| e.n == n)
    }

    /// CSV with columns `n,estimate,ci_low,ci_high,samples`, after `header` lines.
    pub fn to_csv(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push_str("n,estimate,ci_low,ci_high,samples\n");
        for e in &self.points {
            out.push_str(&format!("{},{},{},{},{}\n", e.n, e.estimate, e.ci_low, e.ci_high, e.samples));
        }
        out
    }
}

/// The lower-bound transform `Phi(s) = s / (s + 1)`.
pub fn phi(s: f64) -> f64 {
    s / (s + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_at_one_is_half() {
        assert_eq!(phi(1.0), 0.5);
        assert_eq!(phi(0.0), 0.0);
    }

    #[test]
    fn mean_estimate_of_constant_counts() {
        let e = Estimate::mean(3, 20, 40, 10);
        assert_eq!(e.estimate, 2.0);
        assert_eq!(e.ci_low, 2.0);
        assert_eq!(e.ci_high, 2.0);
    }
}
