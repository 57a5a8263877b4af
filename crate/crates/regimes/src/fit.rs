use mc_stats::linear_fit;
use serde::{Deserialize, Serialize};

use crate::{GrowthRegime, RegimeError};

/// Slope of `log(E T / rate)` against `log n` below which a curve follows its rate.
pub const CONSISTENT_SLOPE: f64 = 0.05;
pub const MIN_POINTS: usize = 6;
pub const MIN_SPAN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitVerdict {
    Consistent,
    /// The ratio still drifts, but like a `1/log n` correction to a constant.
    PrefactorDrift,
    /// The ratio behaves like a power of `n`.
    RegimeMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub regime: GrowthRegime,
    pub points: usize,
    /// `E T(n) / rate(n)` per point.
    pub ratios: Vec<f64>,
    /// Slope of `log ratio` against `log n`.
    pub trend_slope: f64,
    pub trend_se: f64,
    /// `(min, max) / mean` of the ratios.
    pub band: (f64, f64),
    /// `max / min` of the ratios.
    pub band_ratio: f64,
    /// Slope of `log E T` against `log n`.
    pub loglog_slope: f64,
    /// Same slope after dividing out the logarithmic part of the rate.
    pub adjusted_slope: f64,
    /// Exponent of `n` in the rate (`1 - a/xi` in the power regime).
    pub predicted_power: f64,
    /// Limit `C` of the fit `ratio = C + D / log n`.
    pub drift_limit: f64,
    pub verdict: FitVerdict,
}

fn sse(pred: impl Iterator<Item = f64>, obs: &[f64], scale: f64) -> f64 {
    pred.zip(obs).map(|(p, o)| ((p - o) / scale).powi(2)).sum()
}

/// Compares a measured curve `(n, E T(n))` with the rate of `regime`.
///
/// A curve is consistent when the ratio to the rate has no trend in `log n`.
/// Otherwise the ratio is fitted twice, as a power of `n` and as
/// `C + D / log n`; the better fit with `C > 0` calls a prefactor drift,
/// anything else a regime mismatch.
pub fn fit_against_rate(curve: &[(f64, f64)], regime: &GrowthRegime) -> Result<FitReport, RegimeError> {
    if curve.len() < MIN_POINTS {
        return Err(RegimeError::InsufficientData(format!("need {MIN_POINTS} points, got {}", curve.len())));
    }
    if curve.iter().any(|&(n, t)| !(t.is_finite() && t > 0.0) || !n.is_finite()) {
        return Err(RegimeError::InsufficientData("curve values must be positive and finite".into()));
    }
    let n_min = curve.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let n_max = curve.iter().map(|c| c.0).fold(0.0, f64::max);
    if n_max / n_min < MIN_SPAN {
        return Err(RegimeError::InsufficientData(format!("n spans a factor {:.2}, need {MIN_SPAN}", n_max / n_min)));
    }
    let ln: Vec<f64> = curve.iter().map(|c| c.0.ln()).collect();
    let rates = curve.iter().map(|c| regime.rate(c.0)).collect::<Result<Vec<_>, _>>()?;
    let ratios: Vec<f64> = curve.iter().zip(&rates).map(|(c, r)| c.1 / r).collect();
    let log_ratio: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let trend = linear_fit(&ln, &log_ratio)?;

    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);

    let log_t: Vec<f64> = curve.iter().map(|c| c.1.ln()).collect();
    let loglog = linear_fit(&ln, &log_t)?;
    let power = regime.power();
    let adjusted: Vec<f64> = curve
        .iter()
        .zip(&rates)
        .map(|(c, r)| (c.1 * c.0.powf(power) / r).ln())
        .collect();
    let adjusted_slope = linear_fit(&ln, &adjusted)?.slope;

    let inv_log: Vec<f64> = ln.iter().map(|l| 1.0 / l).collect();
    let drift = linear_fit(&inv_log, &ratios)?;
    let drift_sse = sse(inv_log.iter().map(|x| drift.intercept + drift.slope * x), &ratios, mean);
    let power_sse = sse(ln.iter().map(|x| (trend.intercept + trend.slope * x).exp()), &ratios, mean);

    let verdict = if trend.slope.abs() <= CONSISTENT_SLOPE {
        FitVerdict::Consistent
    } else if drift.intercept > 0.0 && drift_sse <= power_sse {
        FitVerdict::PrefactorDrift
    } else {
        FitVerdict::RegimeMismatch
    };
    Ok(FitReport {
        regime: *regime,
        points: curve.len(),
        ratios,
        trend_slope: trend.slope,
        trend_se: trend.slope_se,
        band: (lo / mean, hi / mean),
        band_ratio: hi / lo,
        loglog_slope: loglog.slope,
        adjusted_slope,
        predicted_power: power,
        drift_limit: drift.intercept,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (4..=12).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn exact_proportionality() {
        let g = GrowthRegime::CriticalLog { a: 1.0 };
        let curve: Vec<(f64, f64)> = grid().into_iter().map(|n| (n, 5.0 * g.rate(n).unwrap())).collect();
        let r = fit_against_rate(&curve, &g).unwrap();
        assert!(r.trend_slope.abs() < 1e-12);
        assert!((r.band_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, FitVerdict::Consistent);
        assert!((r.adjusted_slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_correction_is_a_prefactor_drift() {
        let g = GrowthRegime::CriticalLog { a: 1.0 };
        let curve: Vec<(f64, f64)> =
            grid().into_iter().map(|n| (n, g.rate(n).unwrap() * (1.0 + 10.0 / n.ln()))).collect();
        let r = fit_against_rate(&curve, &g).unwrap();
        assert!(r.trend_slope < -CONSISTENT_SLOPE);
        assert_eq!(r.verdict, FitVerdict::PrefactorDrift);
        assert!((r.drift_limit - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wrong_power_is_a_mismatch() {
        let g = GrowthRegime::PowerOverLog { a: 1.0, b: 0.0, xi: 2.0 };
        let curve: Vec<(f64, f64)> = grid().into_iter().map(|n| (n, n / n.ln())).collect();
        let r = fit_against_rate(&curve, &g).unwrap();
        assert_eq!(r.verdict, FitVerdict::RegimeMismatch);
        let bounded: Vec<(f64, f64)> = grid().into_iter().map(|n| (n, n.sqrt())).collect();
        assert_eq!(fit_against_rate(&bounded, &GrowthRegime::Bounded).unwrap().verdict, FitVerdict::RegimeMismatch);
    }

    #[test]
    fn span_and_size_are_checked() {
        let g = GrowthRegime::Bounded;
        let short: Vec<(f64, f64)> = (0..6).map(|k| (10.0 + k as f64, 1.0)).collect();
        assert!(matches!(fit_against_rate(&short, &g), Err(RegimeError::InsufficientData(_))));
        let few: Vec<(f64, f64)> = (0..5).map(|k| (2f64.powi(k + 2), 1.0)).collect();
        assert!(matches!(fit_against_rate(&few, &g), Err(RegimeError::InsufficientData(_))));
        let small_n: Vec<(f64, f64)> = (0..6).map(|k| (2f64.powi(k), 1.0)).collect();
        assert!(matches!(fit_against_rate(&small_n, &g), Err(RegimeError::Domain(_))));
    }
}
