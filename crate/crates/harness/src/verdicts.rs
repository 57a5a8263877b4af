use mc_stats::{ks_normal_test, linear_fit, neumaier_sum, weighted_linear_fit};
use randomness::stream_id;
use regimes::GrowthRegime;
use sequences::BlockSequence;
use serde::{Deserialize, Serialize};

use crate::{ExperimentRecord, HarnessError, Measurement};

/// Largest allowed max/min of a ratio series over the top half of the grid.
pub const BAND_LIMIT: f64 = 4.0;
/// A log-log slope of `Var/Mean` beyond this (and beyond 3 SE) is a power-law trend.
pub const TREND_SLOPE: f64 = 0.1;
pub const CLT_MIN_REPLICAS: usize = 1000;
pub const CLT_NULL_DRAWS: usize = 1000;
const CLT_TAG: u64 = 0x6b73_6e75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarMeanPoint {
    pub n: usize,
    pub mean: f64,
    pub var: f64,
    pub ratio: f64,
    /// Delta-method standard error of `ratio`.
    pub ratio_se: f64,
}

/// `Var / Mean` per grid point with positive mean.
pub fn variance_mean_series(record: &ExperimentRecord, m: Measurement) -> Result<Vec<VarMeanPoint>, HarnessError> {
    let mut out = Vec::new();
    for &n in &record.plan.n_grid {
        let mut xs = record.values(n, m)?;
        if xs.len() < 2 {
            continue;
        }
        xs.sort_by(f64::total_cmp);
        let k = xs.len() as f64;
        let mean = neumaier_sum(xs.iter().copied()) / k;
        if mean <= 0.0 {
            continue;
        }
        let c = |p: i32| neumaier_sum(xs.iter().map(|x| (x - mean).powi(p))) / k;
        let (m2, m3, m4) = (c(2), c(3), c(4));
        let var = m2 * k / (k - 1.0);
        let var_v = ((m4 - m2 * m2 * (k - 3.0) / (k - 1.0)) / k).max(0.0);
        let var_m = var / k;
        let cov = m3 / k;
        let ratio = var / mean;
        let r_var = var_v / (mean * mean) + ratio * ratio * var_m / (mean * mean) - 2.0 * ratio * cov / (mean * mean);
        out.push(VarMeanPoint { n, mean, var, ratio, ratio_se: r_var.max(0.0).sqrt() });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceMeanVerdict {
    pub measure: Measurement,
    pub points: Vec<VarMeanPoint>,
    /// Grid points the verdict is based on.
    pub top_half: Vec<usize>,
    pub band_ratio: f64,
    /// Slope of `log(Var/Mean)` against `log n` over the top half.
    pub trend_slope: f64,
    pub trend_se: f64,
    pub monotone: bool,
    pub trend: bool,
    pub status: VerdictStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

fn top_half<T>(xs: &[T]) -> &[T] {
    &xs[xs.len() / 2..]
}

fn monotone(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0]) || xs.windows(2).all(|w| w[1] < w[0])
}

/// Checks `Var ≍ Mean` on a measured curve.
///
/// Passes when `max/min` of `Var/Mean` over the top half of the grid is at most
/// [`BAND_LIMIT`] and the ratio shows no trend. A trend is a monotone run whose
/// log-log slope exceeds both [`TREND_SLOPE`] and three standard errors.
/// Skipped in the bounded regime, where the mean does not diverge.
pub fn variance_mean_test(
    record: &ExperimentRecord,
    m: Measurement,
    regime: &GrowthRegime,
) -> Result<VarianceMeanVerdict, HarnessError> {
    let points = variance_mean_series(record, m)?;
    let mut v = VarianceMeanVerdict {
        measure: m,
        points,
        top_half: Vec::new(),
        band_ratio: f64::NAN,
        trend_slope: 0.0,
        trend_se: 0.0,
        monotone: false,
        trend: false,
        status: VerdictStatus::Skipped,
        notice: None,
    };
    if *regime == GrowthRegime::Bounded {
        v.notice = Some("bounded regime: the mean does not diverge, test skipped".into());
        v.band_ratio = 0.0;
        return Ok(v);
    }
    let top = top_half(&v.points);
    if top.len() < 2 {
        return Err(HarnessError::InsufficientData(format!("{} usable grid points, need 4", v.points.len())));
    }
    let ratios: Vec<f64> = top.iter().map(|p| p.ratio).collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    let x: Vec<f64> = top.iter().map(|p| (p.n as f64).ln()).collect();
    let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let w: Vec<f64> = top.iter().map(|p| (p.ratio / p.ratio_se.max(1e-12)).powi(2)).collect();
    let fit = weighted_linear_fit(&x, &y, &w)?;
    v.top_half = top.iter().map(|p| p.n).collect();
    v.band_ratio = hi / lo;
    v.trend_slope = fit.slope;
    v.trend_se = fit.slope_se;
    v.monotone = monotone(&ratios);
    v.trend = v.monotone && fit.slope.abs() > TREND_SLOPE && fit.slope.abs() > 3.0 * fit.slope_se;
    v.status = if v.band_ratio <= BAND_LIMIT && !v.trend { VerdictStatus::Pass } else { VerdictStatus::Fail };
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: usize,
    pub measure: Measurement,
    pub replicas: usize,
    pub skew: f64,
    pub statistic: f64,
    /// Simulated (Lilliefors) p-value.
    pub p_value: f64,
    /// Classical Kolmogorov p-value, which ignores that mean and SD were estimated.
    pub p_value_kolmogorov: f64,
    /// Whether a uniform jitter of width 1 was added to integer data.
    pub jittered: bool,
    pub pass: bool,
}

/// Two-sided KS test of the self-standardized samples against `N(0,1)`.
pub fn clt_test(record: &ExperimentRecord, n: usize, m: Measurement) -> Result<CltReport, HarnessError> {
    clt_test_with(record, n, m, CLT_NULL_DRAWS)
}

pub fn clt_test_with(record: &ExperimentRecord, n: usize, m: Measurement, null_draws: usize) -> Result<CltReport, HarnessError> {
    let xs = record.values(n, m)?;
    if xs.len() < CLT_MIN_REPLICAS {
        return Err(HarnessError::InsufficientData(format!("{} replicas at n = {n}, need {CLT_MIN_REPLICAS}", xs.len())));
    }
    let s = record.summary(n, m).ok_or_else(|| HarnessError::MissingMeasurement(m.label()))?;
    if s.var <= 0.0 {
        return Err(HarnessError::Degenerate(format!("{m} has zero variance at n = {n}")));
    }
    let lattice = xs.iter().all(|x| x.fract() == 0.0);
    let seed = stream_id(&[CLT_TAG, record.plan.seed, n as u64]);
    let ks = ks_normal_test(&xs, lattice.then_some(1.0), null_draws, seed)?;
    Ok(CltReport {
        n,
        measure: m,
        replicas: xs.len(),
        skew: s.skew,
        statistic: ks.statistic,
        p_value: ks.p_value,
        p_value_kolmogorov: ks.p_value_kolmogorov,
        jittered: ks.jittered,
        pass: ks.p_value >= 0.01,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IotaRow {
    pub n: usize,
    pub iota: usize,
    pub var: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IotaVerdict {
    pub measure: Measurement,
    pub rows: Vec<IotaRow>,
    /// Least-squares constant of `Var = c iota`.
    pub constant: f64,
    /// `max/min` of `Var/iota` over the top half of the grid.
    pub band_ratio: f64,
    /// Slope of `log Var` against `log iota`; absent when iota is constant on the grid.
    pub loglog_slope: Option<f64>,
    /// Variance does not follow iota (slope outside `[0.5, 1.5]`).
    pub mismatch: bool,
    pub status: VerdictStatus,
}

/// Compares the variance curve with the block clock `iota(n)` of `seq`.
pub fn iota_variance_test(record: &ExperimentRecord, seq: &BlockSequence, m: Measurement) -> Result<IotaVerdict, HarnessError> {
    let mut rows = Vec::new();
    for &n in &record.plan.n_grid {
        let s = record.summary(n, m).ok_or_else(|| HarnessError::MissingMeasurement(m.label()))?;
        let iota = seq.iota(n as u64)?;
        if iota == 0 {
            continue;
        }
        rows.push(IotaRow { n, iota, var: s.var, ratio: s.var / iota as f64 });
    }
    let top = top_half(&rows);
    if top.len() < 2 {
        return Err(HarnessError::InsufficientData(format!("{} usable grid points, need 4", rows.len())));
    }
    let sxy: f64 = rows.iter().map(|r| r.var * r.iota as f64).sum();
    let sxx: f64 = rows.iter().map(|r| (r.iota as f64).powi(2)).sum();
    let hi = top.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let lo = top.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    let band_ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let distinct = rows.windows(2).any(|w| w[0].iota != w[1].iota);
    let loglog_slope = if distinct && rows.iter().all(|r| r.var > 0.0) {
        let x: Vec<f64> = rows.iter().map(|r| (r.iota as f64).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.var.ln()).collect();
        Some(linear_fit(&x, &y)?.slope)
    } else {
        None
    };
    let mismatch = loglog_slope.is_some_and(|s| !(0.5..=1.5).contains(&s));
    let status = if band_ratio <= BAND_LIMIT && !mismatch { VerdictStatus::Pass } else { VerdictStatus::Fail };
    Ok(IotaVerdict { measure: m, rows, constant: sxy / sxx, band_ratio, loglog_slope, mismatch, status })
}
