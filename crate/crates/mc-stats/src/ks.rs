use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::summary::neumaier_sum;
use crate::StatsError;

/// Outcome of a self-standardized Kolmogorov-Smirnov normality test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    /// Null distribution simulated with the same self-standardization (Lilliefors).
    pub p_value: f64,
    /// Classical Kolmogorov p-value, which ignores that mean and SD were estimated.
    pub p_value_kolmogorov: f64,
    /// Whether lattice data were smoothed by uniform jitter before testing.
    pub jittered: bool,
}

/// Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    // Below 0.2 the survival function equals 1 to ten digits.
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `sup |F_n - F|` for sorted data against a continuous CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

fn standardized_sorted(samples: &[f64]) -> Result<Vec<f64>, StatsError> {
    let n = samples.len() as f64;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let mean = neumaier_sum(xs.iter().copied()) / n;
    let var = neumaier_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    if !(var > 0.0) {
        return Err(StatsError::ZeroVariance);
    }
    let sd = var.sqrt();
    Ok(xs.into_iter().map(|x| (x - mean) / sd).collect())
}

fn normal_statistic(standardized: &[f64]) -> f64 {
    let normal = Normal::standard();
    ks_statistic(standardized, |x| normal.cdf(x))
}

/// Two-sided KS test of `samples` against N(0,1) after standardizing by their own mean and SD.
///
/// If `lattice_step` is given, every sample is first moved by an independent
/// uniform offset in `(-step/2, step/2)`. This turns a lattice law into a
/// continuous one with the same CDF at the half-integer points, which is what a
/// normal approximation with continuity correction compares against.
///
/// The reported `p_value` comes from `null_draws` simulated normal samples of
/// the same size, standardized the same way; `seed` makes it reproducible.
pub fn ks_normal_test(
    samples: &[f64],
    lattice_step: Option<f64>,
    null_draws: usize,
    seed: u64,
) -> Result<KsResult, StatsError> {
    if samples.len() < 3 {
        return Err(StatsError::TooFewSamples { needed: 3, got: samples.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = samples.to_vec();
    // Degeneracy is judged on the raw data, before any jitter.
    standardized_sorted(&data)?;
    if let Some(step) = lattice_step {
        for x in data.iter_mut() {
            *x += step * (rng.random::<f64>() - 0.5);
        }
    }
    let z = standardized_sorted(&data)?;
    let n = z.len();
    let statistic = normal_statistic(&z);
    let sqrt_n = (n as f64).sqrt();
    let p_value_kolmogorov = kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic);

    let mut exceed = 0usize;
    let mut buf = vec![0.0f64; n];
    for _ in 0..null_draws {
        for v in buf.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let d = normal_statistic(&standardized_sorted(&buf)?);
        if d >= statistic {
            exceed += 1;
        }
    }
    let p_value = (exceed + 1) as f64 / (null_draws + 1) as f64;
    Ok(KsResult { n, statistic, p_value, p_value_kolmogorov, jittered: lattice_step.is_some() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_quantiles() {
        // Standard critical values: 1.358 at 5%, 1.628 at 1%.
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn statistic_of_uniform_grid() {
        // Midpoints (i + 1/2)/n against U(0,1) give D = 1/(2n).
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        assert!((ks_statistic(&xs, |x| x) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn constant_samples_are_degenerate() {
        assert_eq!(ks_normal_test(&[2.0; 100], None, 10, 0), Err(StatsError::ZeroVariance));
        assert_eq!(ks_normal_test(&[2.0; 100], Some(1.0), 10, 0), Err(StatsError::ZeroVariance));
    }

    #[test]
    fn exponential_data_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..1000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let r = ks_normal_test(&xs, None, 200, 1).unwrap();
        assert!(r.p_value < 0.01, "{r:?}");
    }
}
