use fpp_core::{line_passage_times, top_down_crossing_exists, Mode, ShortestPaths};
use mc_stats::{wilson_interval, Z95};
use randomness::{WeightField, WeightModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wedge::{WedgeFunction, WedgeGraph};

use crate::sequence::{build_sequence, BlockSequence, Regime};
use crate::SeqError;

/// Monte Carlo budget and thresholds for [`audit_assumptions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    /// Blocks `i_lo..=i_hi` are audited.
    pub i_lo: usize,
    pub i_hi: usize,
    pub samples: u64,
    /// Levels `M` for the line-to-line tail.
    pub m_list: Vec<u64>,
    pub seed: u64,
    /// Crossing-probability floor; defaults to 1/4, or 1/2 for case 2b.
    #[serde(default)]
    pub c1: Option<f64>,
    /// Mean-increment ceiling; defaults to [`DEFAULT_C2`].
    #[serde(default)]
    pub c2: Option<f64>,
}

/// Default ceiling for the mean increments.
pub const DEFAULT_C2: f64 = 4.0;

/// One estimate for block `i` spanning columns `[s, t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditPoint {
    pub i: usize,
    pub s: u64,
    pub t: u64,
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub m: u64,
    pub points: Vec<AuditPoint>,
    pub min_estimate: f64,
    /// Every block saw the tail event at least once.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionAudit {
    pub regime: Regime,
    pub i_lo: usize,
    pub i_hi: usize,
    pub samples: u64,
    pub c1: f64,
    pub c2: f64,
    pub a1: Vec<AuditPoint>,
    pub a2: Vec<AuditPoint>,
    pub a3: Vec<TailRow>,
    pub a1_min: f64,
    /// `min A1 >= c1 - 3 se`.
    pub a1_pass: bool,
    pub a2_max: f64,
    /// `max A2 <= c2 + 3 se`.
    pub a2_pass: bool,
    /// Constant of the increment bound, fitted on the first half of the range.
    pub lemma_constant: f64,
    /// The fitted bound holds on the whole range within `3 se`.
    pub lemma_pass: bool,
    pub a3_pass: bool,
    /// Smallest audited index from which all three checks keep holding.
    pub clear_index: Option<usize>,
}

fn proportion_point(i: usize, s: u64, t: u64, hits: u64, n: u64) -> AuditPoint {
    let est = hits as f64 / n as f64;
    let (lo, hi) = wilson_interval(hits, n, Z95);
    AuditPoint { i, s, t, estimate: est, se: (est * (1.0 - est) / n as f64).sqrt(), ci_low: lo, ci_high: hi }
}

fn mean_point(i: usize, s: u64, t: u64, sum: u64, sum_sq: u64, n: u64) -> AuditPoint {
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = if n > 1 { ((sum_sq as f64 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    let se = (var / nf).sqrt();
    AuditPoint { i, s, t, estimate: mean, se, ci_low: mean - Z95 * se, ci_high: mean + Z95 * se }
}

/// Shape of the mean-increment bound between lines `s < t`, up to a constant.
fn lemma_form(seq: &BlockSequence, s: u64, t: u64) -> f64 {
    let level = seq.f.floor_at(s).max(1) as f64;
    match (seq.regime, seq.xi) {
        (Regime::Critical, _) | (_, None) => (t - s) as f64 / level + 1.0,
        (_, Some(xi)) => ((t - s) as f64 + level) * (-level / xi).exp(),
    }
}

struct SampleOutcome {
    crossed: Vec<bool>,
    increments: Vec<u64>,
    line_to_line: Vec<u64>,
}

fn one_sample(graph: &WedgeGraph, model: &WeightModel, blocks: &[(u64, u64)], seed: u64, stream: u64) -> SampleOutcome {
    let field = WeightField::sample(model, graph, seed, stream);
    let times = line_passage_times(graph, &field, Mode::Bernoulli);
    let mut out = SampleOutcome { crossed: Vec::new(), increments: Vec::new(), line_to_line: Vec::new() };
    for &(s, t) in blocks {
        let (s, t) = (s as usize, t as usize);
        out.crossed.push(top_down_crossing_exists(graph, &field, s, t));
        out.increments.push((times[t] - times[s]) as u64);
        let sources: Vec<usize> = graph.line(s).collect();
        let sp = ShortestPaths::compute(graph, &field, &sources, Mode::Bernoulli, Some((s, t)));
        let (_, d) = sp.best_in(graph.line(t)).expect("adjacent lines are connected inside the strip");
        out.line_to_line.push(d as u64);
    }
    out
}

/// Estimates, for each block `R_i` with `i` in the configured range, the
/// top-down open crossing probability, the paired mean increment
/// `E T^B(0, P(r_{i+1})) - E T^B(0, P(r_i))`, and `P(T^B(P(r_i), P(r_{i+1})) >= M)`.
///
/// Only the Bernoulli part of `model` matters. Sample `k` uses stream `k`, so the
/// result does not depend on the number of worker threads.
pub fn audit_assumptions(seq: &BlockSequence, model: &WeightModel, cfg: &AuditConfig) -> Result<AssumptionAudit, SeqError> {
    if cfg.i_lo > cfg.i_hi {
        return Err(SeqError::InvalidParameter(format!("empty block range {}..={}", cfg.i_lo, cfg.i_hi)));
    }
    if cfg.samples < 2 {
        return Err(SeqError::InvalidParameter("an audit needs at least two samples".into()));
    }
    let blocks: Vec<(u64, u64)> = (cfg.i_lo..=cfg.i_hi)
        .map(|i| seq.region(i).ok_or(SeqError::Exhausted { needed: i + 1, available: seq.len() }))
        .collect::<Result<_, _>>()?;
    let n_max = blocks.last().unwrap().1 as usize;
    let graph = WedgeGraph::build(&seq.f, n_max.max(1))?;
    let bernoulli = WeightModel::constant(model.p);

    let outcomes: Vec<SampleOutcome> =
        (0..cfg.samples).into_par_iter().map(|k| one_sample(&graph, &bernoulli, &blocks, cfg.seed, k)).collect();

    let nb = blocks.len();
    let mut hits = vec![0u64; nb];
    let (mut sum, mut sum_sq) = (vec![0u64; nb], vec![0u64; nb]);
    let mut tails = vec![vec![0u64; nb]; cfg.m_list.len()];
    for o in &outcomes {
        for b in 0..nb {
            hits[b] += o.crossed[b] as u64;
            sum[b] += o.increments[b];
            sum_sq[b] += o.increments[b] * o.increments[b];
            for (mi, &m) in cfg.m_list.iter().enumerate() {
                tails[mi][b] += (o.line_to_line[b] >= m) as u64;
            }
        }
    }

    let n = cfg.samples;
    let index = |b: usize| cfg.i_lo + b;
    let a1: Vec<AuditPoint> =
        (0..nb).map(|b| proportion_point(index(b), blocks[b].0, blocks[b].1, hits[b], n)).collect();
    let a2: Vec<AuditPoint> =
        (0..nb).map(|b| mean_point(index(b), blocks[b].0, blocks[b].1, sum[b], sum_sq[b], n)).collect();
    let a3: Vec<TailRow> = cfg
        .m_list
        .iter()
        .zip(&tails)
        .map(|(&m, counts)| {
            let points: Vec<AuditPoint> =
                (0..nb).map(|b| proportion_point(index(b), blocks[b].0, blocks[b].1, counts[b], n)).collect();
            let min_estimate = points.iter().map(|p| p.estimate).fold(f64::INFINITY, f64::min);
            TailRow { m, pass: counts.iter().all(|&c| c > 0), points, min_estimate }
        })
        .collect();

    let c1 = cfg.c1.unwrap_or(if seq.regime == Regime::AtXi { 0.5 } else { 0.25 });
    let c2 = cfg.c2.unwrap_or(DEFAULT_C2);
    let a1_ok = |p: &AuditPoint| p.estimate + 3.0 * p.se >= c1;
    let a2_ok = |p: &AuditPoint| p.estimate - 3.0 * p.se <= c2;
    let a3_ok = |b: usize| tails.iter().all(|c| c[b] > 0);

    let forms: Vec<f64> = blocks.iter().map(|&(s, t)| lemma_form(seq, s, t)).collect();
    let fit_len = nb.div_ceil(2);
    let lemma_constant = (0..fit_len).map(|b| a2[b].estimate / forms[b]).fold(0.0, f64::max);
    let lemma_pass = (0..nb).all(|b| a2[b].estimate <= lemma_constant * forms[b] + 3.0 * a2[b].se);

    let mut clear_index = None;
    for b in (0..nb).rev() {
        if a1_ok(&a1[b]) && a2_ok(&a2[b]) && a3_ok(b) {
            clear_index = Some(index(b));
        } else {
            break;
        }
    }

    Ok(AssumptionAudit {
        regime: seq.regime,
        i_lo: cfg.i_lo,
        i_hi: cfg.i_hi,
        samples: n,
        c1,
        c2,
        a1_min: a1.iter().map(|p| p.estimate).fold(f64::INFINITY, f64::min),
        a1_pass: a1.iter().all(a1_ok),
        a2_max: a2.iter().map(|p| p.estimate).fold(0.0, f64::max),
        a2_pass: a2.iter().all(a2_ok),
        lemma_constant,
        lemma_pass,
        a3_pass: a3.iter().all(|r| r.pass),
        clear_index,
        a1,
        a2,
        a3,
    })
}

/// One row of the correlation-length sensitivity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub factor: f64,
    pub xi: f64,
    pub j0: Option<u64>,
    pub a1_min: Option<f64>,
    pub a2_max: Option<f64>,
    pub a3_pass: Option<bool>,
    /// Why the perturbed sequence could not be built or audited.
    pub error: Option<String>,
}

/// Rebuilds and re-audits the sequence with `xi` scaled by 0.9, 1 and 1.1.
pub fn xi_sensitivity(
    f: &WedgeFunction,
    p: f64,
    xi: f64,
    regime: Regime,
    i_max: usize,
    model: &WeightModel,
    cfg: &AuditConfig,
) -> Vec<SensitivityRow> {
    [0.9, 1.0, 1.1]
        .into_iter()
        .map(|factor| {
            let x = xi * factor;
            let run = build_sequence(f, p, Some(x), regime, i_max)
                .and_then(|seq| audit_assumptions(&seq, model, cfg).map(|a| (seq.j0, a)));
            match run {
                Ok((j0, a)) => SensitivityRow {
                    factor,
                    xi: x,
                    j0,
                    a1_min: Some(a.a1_min),
                    a2_max: Some(a.a2_max),
                    a3_pass: Some(a.a3_pass),
                    error: None,
                },
                Err(e) => SensitivityRow {
                    factor,
                    xi: x,
                    j0: None,
                    a1_min: None,
                    a2_max: None,
                    a3_pass: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
