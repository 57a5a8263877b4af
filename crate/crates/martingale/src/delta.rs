use fpp_core::{Mode, ShortestPaths};
use mc_stats::Summary;
use randomness::{stream_id, WeightField, WeightModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sequences::BlockSequence;
use wedge::WedgeGraph;

use crate::leftmost::{interior, leftmost_crossing, CrossingState};
use crate::scan::{block_columns, find_m, DEFAULT_CAP};
use crate::MartError;

const OUTER_TAG: u64 = 0x6f75_7465;
const INNER_TAG: u64 = 0x696e_6e65;

/// Blocks sampled past the scan start before an inner field is extended.
const INNER_LOOKAHEAD: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleConfig {
    pub i0: usize,
    /// Outer fields `omega`.
    pub outer: usize,
    /// Inner fields `omega'` per increment.
    pub inner: usize,
    /// Blocks scanned past the start of an `m` search.
    pub cap: usize,
    pub seed: u64,
    /// Largest tolerated fraction of discarded inner replicas.
    pub max_discard_fraction: f64,
}

impl Default for MartingaleConfig {
    fn default() -> Self {
        MartingaleConfig { i0: 10, outer: 500, inner: 256, cap: DEFAULT_CAP, seed: 0, max_discard_fraction: 0.1 }
    }
}

/// One increment `Delta_{i,i0}` on one outer field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub i: usize,
    pub i0: usize,
    pub delta_hat: f64,
    /// Inner replicas actually used.
    pub inner_samples: usize,
    pub discards: usize,
    /// `T(Gamma_{i-1}, Gamma_i)` on the outer field (`T(0, Gamma_0)` for `i = 0`).
    pub t_gap: f64,
    /// `E_{i-1,i0} = {m(i-1) < i0}`; always true for `i = 0`.
    pub e_prev: bool,
    /// `E_{i,i0} = {m(i) < i0}`.
    pub e_cur: bool,
    /// Inner mean of the positive passage term.
    pub inner_first: f64,
    /// Inner mean of the subtracted passage term.
    pub inner_second: f64,
    /// Standard error of `inner_first - inner_second`.
    pub inner_se: f64,
}

impl DeltaEstimate {
    pub fn recombine(&self) -> f64 {
        self.t_gap + self.inner_first - self.inner_second
    }
}

/// Everything computed on one outer field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub outer: usize,
    /// `T(0, Gamma_{i0})`.
    pub t_gamma: f64,
    /// `m(0), ..., m(i0)`.
    pub m: Vec<usize>,
    /// Lattice faces left of `Gamma_0, ..., Gamma_{i0}` inside their blocks.
    pub interior_area: Vec<i64>,
    pub deltas: Vec<DeltaEstimate>,
}

impl OuterRecord {
    pub fn delta_sum(&self) -> f64 {
        self.deltas.iter().map(|d| d.delta_hat).sum()
    }
}

/// Nested Monte Carlo for the increments of `T(0, Gamma_{i0})`.
#[derive(Debug, Clone)]
pub struct Martingale {
    graph: WedgeGraph,
    seq: BlockSequence,
    model: WeightModel,
    cfg: MartingaleConfig,
}

/// Where a passage time starts: the origin or a crossing.
#[derive(Clone, Copy)]
enum Start<'a> {
    Origin,
    Crossing(&'a [usize]),
}

/// Passage time from `from` to the crossing `to`, which lies to its right.
///
/// Crossings are open, so an optimal path can be cut to run between the two
/// sets; restricting the search to those columns does not change the value.
fn passage(graph: &WedgeGraph, field: &WeightField, from: Start, to: &[usize]) -> Result<f64, MartError> {
    let hi = to.iter().map(|&v| graph.coords(v).0).max().unwrap_or(0);
    let (sources, lo) = match from {
        Start::Origin => (vec![0], 0),
        Start::Crossing(c) => (c.to_vec(), c.iter().map(|&v| graph.coords(v).0).min().unwrap_or(0)),
    };
    let sp = ShortestPaths::compute(graph, field, &sources, Mode::General, Some((lo, hi)));
    sp.best_in(to.iter().copied())
        .map(|(_, d)| d)
        .ok_or_else(|| MartError::Internal("crossings are not connected".into()))
}

/// Inner field sampled only over the columns a scan has needed so far.
struct InnerField<'a> {
    mart: &'a Martingale,
    stream: u64,
    lo: usize,
    last_block: usize,
    field: WeightField,
}

impl<'a> InnerField<'a> {
    fn new(mart: &'a Martingale, stream: u64, lo: usize, start: usize) -> Result<Self, MartError> {
        let last_block = (start + INNER_LOOKAHEAD).min(mart.max_block());
        let field = mart.sample_inner(stream, lo, last_block)?;
        Ok(InnerField { mart, stream, lo, last_block, field })
    }

    /// `m(start)` on this field, or `None` when the scan cap is hit.
    fn scan(&mut self, start: usize) -> Result<Option<usize>, MartError> {
        let last = (start + self.mart.cfg.cap).min(self.mart.max_block());
        for j in start..=last {
            if j > self.last_block {
                self.last_block = (2 * self.last_block).clamp(j, self.mart.max_block());
                self.field = self.mart.sample_inner(self.stream, self.lo, self.last_block)?;
            }
            let (lo, hi) = block_columns(&self.mart.graph, &self.mart.seq, j)?;
            if fpp_core::top_down_crossing_exists(&self.mart.graph, &self.field, lo, hi) {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    fn crossing(&self, j: usize) -> Result<Vec<usize>, MartError> {
        let (lo, hi) = block_columns(&self.mart.graph, &self.mart.seq, j)?;
        leftmost_crossing(&self.mart.graph, &self.field, lo, hi)
    }
}

impl Martingale {
    /// Entries `r_0..=r_k` the sequence must provide for `i0` and `cap`.
    pub fn required_len(i0: usize, cap: usize) -> usize {
        2 * (i0 + cap) + 2
    }

    pub fn new(seq: BlockSequence, model: WeightModel, cfg: MartingaleConfig) -> Result<Self, MartError> {
        model.validate().map_err(|e| MartError::InvalidParameter(e.to_string()))?;
        if cfg.outer == 0 || cfg.inner == 0 {
            return Err(MartError::InvalidParameter("outer and inner replica counts must be positive".into()));
        }
        if !(0.0..1.0).contains(&cfg.max_discard_fraction) {
            return Err(MartError::InvalidParameter("discard fraction must lie in [0, 1)".into()));
        }
        let need = Self::required_len(cfg.i0, cfg.cap);
        if seq.len() < need {
            return Err(MartError::SequenceTooShort { needed: need - 1, available: seq.len().saturating_sub(1) });
        }
        let width = seq.r[need - 1] as usize;
        let graph = WedgeGraph::build(&seq.f, width)?;
        Ok(Martingale { graph, seq, model, cfg })
    }

    pub fn graph(&self) -> &WedgeGraph {
        &self.graph
    }

    pub fn sequence(&self) -> &BlockSequence {
        &self.seq
    }

    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    pub fn config(&self) -> &MartingaleConfig {
        &self.cfg
    }

    fn max_block(&self) -> usize {
        self.cfg.i0 + self.cfg.cap
    }

    fn sample_inner(&self, stream: u64, lo: usize, last_block: usize) -> Result<WeightField, MartError> {
        let (_, hi) = block_columns(&self.graph, &self.seq, last_block)?;
        Ok(WeightField::sample_columns(&self.model, &self.graph, self.cfg.seed, stream, lo, hi))
    }

    pub fn outer_field(&self, outer: usize) -> WeightField {
        WeightField::sample(&self.model, &self.graph, self.cfg.seed, stream_id(&[OUTER_TAG, outer as u64]))
    }

    /// `m(i)` and `Gamma_i` for `i = 0..=i0` on one field.
    pub fn crossings(&self, field: &WeightField) -> Result<Vec<CrossingState>, MartError> {
        let mut out: Vec<CrossingState> = Vec::with_capacity(self.cfg.i0 + 1);
        for i in 0..=self.cfg.i0 {
            if let Some(prev) = out.last().filter(|s| s.m_i >= i) {
                let state = CrossingState { i, ..prev.clone() };
                out.push(state);
                continue;
            }
            let m_i = find_m(&self.graph, field, &self.seq, i, self.cfg.cap)?;
            let (lo, hi) = block_columns(&self.graph, &self.seq, m_i)?;
            let gamma = leftmost_crossing(&self.graph, field, lo, hi)?;
            let interior_area = interior(&self.graph, lo, &gamma)?.faces;
            out.push(CrossingState { i, m_i, gamma, interior_area });
        }
        Ok(out)
    }

    /// `T(0, Gamma_{i0})` on the given outer replica.
    pub fn gamma_passage(&self, outer: usize) -> Result<f64, MartError> {
        let field = self.outer_field(outer);
        let states = self.crossings(&field)?;
        passage(&self.graph, &field, Start::Origin, &states[self.cfg.i0].gamma)
    }

    /// `Delta_{i,i0}` on the outer field, with inner expectations estimated from
    /// `inner` fresh fields.
    pub fn estimate_delta(
        &self,
        outer: usize,
        field: &WeightField,
        states: &[CrossingState],
        i: usize,
    ) -> Result<DeltaEstimate, MartError> {
        let i0 = self.cfg.i0;
        if i > i0 || states.len() != i0 + 1 {
            return Err(MartError::InvalidParameter(format!("increment {i} outside 0..={i0}")));
        }
        let cur = &states[i];
        let prev = (i > 0).then(|| &states[i - 1]);
        let from_prev = prev.map_or(Start::Origin, |p| Start::Crossing(&p.gamma));
        let t_gap = match prev {
            Some(p) if p.m_i == cur.m_i => 0.0,
            _ => passage(&self.graph, field, from_prev, &cur.gamma)?,
        };
        let e_prev = prev.is_none_or(|p| p.m_i < i0);
        let e_cur = cur.m_i < i0;
        let mut est = DeltaEstimate {
            i,
            i0,
            delta_hat: t_gap,
            inner_samples: 0,
            discards: 0,
            t_gap,
            e_prev,
            e_cur,
            inner_first: 0.0,
            inner_second: 0.0,
            inner_se: 0.0,
        };
        let same_crossing = prev.is_some_and(|p| p.m_i == cur.m_i);
        if !e_prev || (e_cur && same_crossing) {
            return Ok(est);
        }

        let lo = match from_prev {
            Start::Origin => 0,
            Start::Crossing(c) => c.iter().map(|&v| self.graph.coords(v).0).min().unwrap_or(0),
        };
        let start = if e_cur { cur.m_i + 1 } else { i0 };
        let mut first = Vec::with_capacity(self.cfg.inner);
        let mut second = Vec::with_capacity(self.cfg.inner);
        for k in 0..self.cfg.inner {
            let stream = stream_id(&[INNER_TAG, outer as u64, i as u64, k as u64]);
            let mut inner = InnerField::new(self, stream, lo, start)?;
            let Some(lambda) = inner.scan(start)? else {
                est.discards += 1;
                continue;
            };
            let target = inner.crossing(lambda)?;
            if e_cur {
                first.push(passage(&self.graph, &inner.field, Start::Crossing(&cur.gamma), &target)?);
            }
            second.push(passage(&self.graph, &inner.field, from_prev, &target)?);
        }
        if est.discards as f64 > self.cfg.max_discard_fraction * self.cfg.inner as f64 {
            return Err(MartError::TooManyDiscards { i, discards: est.discards, samples: self.cfg.inner });
        }
        est.inner_samples = second.len();
        let diffs: Vec<f64> = if e_cur {
            first.iter().zip(&second).map(|(a, b)| a - b).collect()
        } else {
            second.iter().map(|b| -b).collect()
        };
        let s = Summary::from_samples(&diffs)?;
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        est.inner_first = mean(&first);
        est.inner_second = mean(&second);
        est.inner_se = s.std_err();
        est.delta_hat = t_gap + s.mean;
        Ok(est)
    }

    pub fn outer_record(&self, outer: usize) -> Result<OuterRecord, MartError> {
        let field = self.outer_field(outer);
        let states = self.crossings(&field)?;
        let t_gamma = passage(&self.graph, &field, Start::Origin, &states[self.cfg.i0].gamma)?;
        let deltas = (0..=self.cfg.i0)
            .map(|i| self.estimate_delta(outer, &field, &states, i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OuterRecord {
            outer,
            t_gamma,
            m: states.iter().map(|s| s.m_i).collect(),
            interior_area: states.iter().map(|s| s.interior_area).collect(),
            deltas,
        })
    }

    /// All outer replicas, in parallel; the result does not depend on the thread count.
    pub fn run(&self) -> Result<Vec<OuterRecord>, MartError> {
        (0..self.cfg.outer).into_par_iter().map(|o| self.outer_record(o)).collect()
    }
}
