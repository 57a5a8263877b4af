use fpp_core::top_down_crossing_exists;
use mc_stats::{ks_normal_test, linear_fit, KsResult, Summary};
use randomness::{stream_id, WeightField, WeightModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sequences::BlockSequence;
use wedge::WedgeGraph;

use crate::delta::{Martingale, OuterRecord};
use crate::scan::block_columns;
use crate::MartError;

const TAIL_TAG: u64 = 0x7461_696c;

/// Largest tolerated ratio of the extreme second moments past the audit index.
pub const MOMENT_BAND: f64 = 20.0;
/// Baseline decorrelation threshold at block spacing >= 2.
pub const RHO_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelescopingCheck {
    pub outer: usize,
    pub t_mean: f64,
    pub t_var: f64,
    /// Mean over outer fields of `|sum_i Delta_i - (T - mean T)|`.
    pub mean_abs_diff: f64,
    /// Mean over outer fields of the propagated standard error of that difference.
    pub mean_se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub i: usize,
    pub mean: f64,
    pub se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCheck {
    /// Pairs `(i, j)` with `j - i >= 2` and nonzero variance at both ends.
    pub pairs: usize,
    pub max_abs_rho: f64,
    pub at: Option<(usize, usize)>,
    /// `max(0.1, 3 / sqrt(outer))`.
    pub threshold: f64,
    pub exceed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub i: usize,
    pub second_moment: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub from_i: usize,
    pub rows: Vec<MomentRow>,
    pub band_ratio: Option<f64>,
    pub upper_pass: bool,
    pub lower_pass: bool,
    /// `(x, P(|Delta| >= x))` at `x = 2, ..., 10`, pooled over `i >= from_i`.
    pub tail_points: Vec<(f64, f64)>,
    pub tail_slope: Option<f64>,
    pub tail_pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSummary {
    pub telescoping: TelescopingCheck,
    pub means: Vec<MeanCheck>,
    pub means_pass: bool,
    pub correlation: CorrelationCheck,
    pub moments: MomentReport,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn increments(records: &[OuterRecord], i: usize) -> Vec<f64> {
    records.iter().map(|r| r.deltas[i].delta_hat).collect()
}

/// `sum_i Delta_i` against `T - mean T`, per outer field.
pub fn telescoping_check(records: &[OuterRecord]) -> Result<TelescopingCheck, MartError> {
    let ts: Vec<f64> = records.iter().map(|r| r.t_gamma).collect();
    let s = Summary::from_samples(&ts)?;
    let n = records.len() as f64;
    let mut diffs = Vec::with_capacity(records.len());
    let mut ses = Vec::with_capacity(records.len());
    for r in records {
        diffs.push((r.delta_sum() - (r.t_gamma - s.mean)).abs());
        let inner: f64 = r.deltas.iter().map(|d| d.inner_se * d.inner_se).sum();
        ses.push((inner + s.var / n).sqrt());
    }
    let mean_abs_diff = mean(&diffs);
    let mean_se = mean(&ses);
    Ok(TelescopingCheck {
        outer: records.len(),
        t_mean: s.mean,
        t_var: s.var,
        mean_abs_diff,
        mean_se,
        pass: mean_abs_diff <= 3.0 * mean_se,
    })
}

/// Per-increment mean over outer fields, within three standard errors of zero.
pub fn mean_checks(records: &[OuterRecord]) -> Result<Vec<MeanCheck>, MartError> {
    let Some(first) = records.first() else {
        return Err(MartError::InvalidParameter("no outer records".into()));
    };
    (0..first.deltas.len())
        .map(|i| {
            let s = Summary::from_samples(&increments(records, i))?;
            let se = s.std_err();
            Ok(MeanCheck { i, mean: s.mean, se, pass: s.mean.abs() <= 3.0 * se })
        })
        .collect()
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Sample correlations of increments at block spacing two or more.
pub fn correlation_check(records: &[OuterRecord]) -> CorrelationCheck {
    let k = records.first().map_or(0, |r| r.deltas.len());
    let cols: Vec<Vec<f64>> = (0..k).map(|i| increments(records, i)).collect();
    let threshold = RHO_THRESHOLD.max(3.0 / (records.len().max(1) as f64).sqrt());
    let mut out = CorrelationCheck { pairs: 0, max_abs_rho: 0.0, at: None, threshold, exceed: 0 };
    for i in 0..k {
        for j in i + 2..k {
            if let Some(rho) = pearson(&cols[i], &cols[j]) {
                out.pairs += 1;
                if rho.abs() > threshold {
                    out.exceed += 1;
                }
                if rho.abs() > out.max_abs_rho {
                    out.max_abs_rho = rho.abs();
                    out.at = Some((i, j));
                }
            }
        }
    }
    out
}

/// Second moments of the increments and the tail of `|Delta|`.
///
/// The band and tail verdicts use only `i >= from_i`. The tail slope is the
/// least-squares slope of `log P(|Delta| >= x)` against `log x`, and passes
/// when it is at most `-eta/2 + 0.5`.
pub fn check_moment_bounds(records: &[OuterRecord], from_i: usize, eta: Option<f64>) -> Result<MomentReport, MartError> {
    let k = records.first().map_or(0, |r| r.deltas.len());
    if from_i >= k {
        return Err(MartError::InvalidParameter(format!("no increments from index {from_i}")));
    }
    let mut rows = Vec::new();
    for i in 0..k {
        let sq: Vec<f64> = increments(records, i).iter().map(|d| d * d).collect();
        let s = Summary::from_samples(&sq)?;
        rows.push(MomentRow { i, second_moment: s.mean, se: s.std_err() });
    }
    let band: Vec<f64> = rows[from_i..].iter().map(|r| r.second_moment).collect();
    let lo = band.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = band.iter().copied().fold(0.0, f64::max);
    let band_ratio = (lo > 0.0).then(|| hi / lo);

    let pooled: Vec<f64> = records.iter().flat_map(|r| r.deltas[from_i..].iter().map(|d| d.delta_hat.abs())).collect();
    let tail_points: Vec<(f64, f64)> = (2..=10)
        .map(|x| {
            let x = x as f64;
            (x, pooled.iter().filter(|&&d| d >= x).count() as f64 / pooled.len() as f64)
        })
        .filter(|&(_, p)| p > 0.0)
        .collect();
    let tail_slope = if tail_points.len() >= 3 {
        let lx: Vec<f64> = tail_points.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = tail_points.iter().map(|p| p.1.ln()).collect();
        linear_fit(&lx, &ly).ok().map(|f| f.slope)
    } else {
        None
    };
    let tail_pass = eta.zip(tail_slope).map(|(e, s)| s <= -e / 2.0 + 0.5);
    Ok(MomentReport {
        from_i,
        rows,
        band_ratio,
        upper_pass: band_ratio.is_some_and(|r| r < MOMENT_BAND),
        lower_pass: lo > 0.0,
        tail_points,
        tail_slope,
        tail_pass,
    })
}

pub fn summarize(records: &[OuterRecord], from_i: usize, eta: Option<f64>) -> Result<MartingaleSummary, MartError> {
    let means = mean_checks(records)?;
    Ok(MartingaleSummary {
        telescoping: telescoping_check(records)?,
        means_pass: means.iter().all(|m| m.pass),
        means,
        correlation: correlation_check(records),
        moments: check_moment_bounds(records, from_i, eta)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: usize,
    /// `P(m(i) >= i + t)`.
    pub estimate: f64,
    pub se: f64,
    /// `(1 - a1/2)^t + 3 se`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    pub i: usize,
    pub samples: usize,
    /// Smallest crossing frequency over the blocks `i..i + t_max`.
    pub a1: f64,
    pub rows: Vec<TailRow>,
    pub pass: bool,
}

/// Empirical `P(m(i) >= i + t)` for `t = 1..=t_max`, against the geometric
/// bound built from the crossing frequencies of the same blocks.
pub fn geometric_tail(
    seq: &BlockSequence,
    model: &WeightModel,
    i: usize,
    t_max: usize,
    samples: usize,
    seed: u64,
) -> Result<GeometricTail, MartError> {
    if t_max == 0 || samples == 0 {
        return Err(MartError::InvalidParameter("t_max and samples must be positive".into()));
    }
    let last = i + t_max - 1;
    let (_, width) = seq
        .region_prime(last)
        .ok_or(MartError::SequenceTooShort { needed: 2 * last + 1, available: seq.len().saturating_sub(1) })?;
    let graph = WedgeGraph::build(&seq.f, width as usize)?;
    let (lo, _) = block_columns(&graph, seq, i)?;
    let hits: Vec<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let field = WeightField::sample_columns(model, &graph, seed, stream_id(&[TAIL_TAG, i as u64, k as u64]), lo, width as usize);
            (i..=last)
                .map(|j| {
                    let (a, b) = block_columns(&graph, seq, j)?;
                    Ok(top_down_crossing_exists(&graph, &field, a, b))
                })
                .collect::<Result<Vec<bool>, MartError>>()
        })
        .collect::<Result<_, _>>()?;
    let n = samples as f64;
    let a1 = (0..t_max)
        .map(|b| hits.iter().filter(|h| h[b]).count() as f64 / n)
        .fold(1.0, f64::min);
    let rows: Vec<TailRow> = (1..=t_max)
        .map(|t| {
            let misses = hits.iter().filter(|h| h[..t].iter().all(|&x| !x)).count() as f64;
            let estimate = misses / n;
            let se = (estimate * (1.0 - estimate) / n).sqrt();
            let bound = (1.0 - a1 / 2.0).powi(t as i32) + 3.0 * se;
            TailRow { t, estimate, se, bound, pass: estimate <= bound }
        })
        .collect();
    Ok(GeometricTail { i, samples, a1, pass: rows.iter().all(|r| r.pass), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaClt {
    pub replicas: usize,
    pub summary: Summary,
    pub ks: KsResult,
    pub pass: bool,
}

/// KS test of the self-standardized `T(0, Gamma_{i0})` against N(0,1) at level 0.01.
///
/// Lattice-valued passage times (constant positive law) are jittered by one
/// lattice step first.
pub fn gamma_clt(mart: &Martingale, replicas: usize, null_draws: usize) -> Result<GammaClt, MartError> {
    let ts: Vec<f64> = (0..replicas).into_par_iter().map(|o| mart.gamma_passage(o)).collect::<Result<_, _>>()?;
    let step = mart.model().is_constant().then_some(mart.model().delta);
    let ks = ks_normal_test(&ts, step, null_draws, mart.config().seed ^ TAIL_TAG)?;
    Ok(GammaClt { replicas, summary: Summary::from_samples(&ts)?, pass: ks.p_value >= 0.01, ks })
}
