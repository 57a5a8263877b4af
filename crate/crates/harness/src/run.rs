use fpp_core::{line_passage_times, DualGraph, Mode};
use mc_stats::Summary;
use randomness::{stream_id, WeightField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wedge::{WedgeError, WedgeGraph};

use crate::verdicts::{clt_test, variance_mean_series, CltReport, VarMeanPoint, CLT_MIN_REPLICAS};
use crate::{ExperimentPlan, HarnessError, Measurement, SCHEMA};

const REPLICA_TAG: u64 = 0x6861_726e;

/// All measured values of one replica at one `n`, in plan order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSample {
    pub n: usize,
    pub replica: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub measure: Measurement,
    pub mean: f64,
    pub var: f64,
    pub skew: f64,
    /// Absent below [`MIN_CI_REPLICAS`](crate::MIN_CI_REPLICAS) replicas.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub replicas: usize,
}

impl SummaryRow {
    pub fn std_err(&self) -> f64 {
        (self.var / self.replicas as f64).sqrt()
    }
}

/// Replicas on which `T^B(0, P(n)) == Y_n` was asserted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityTally {
    pub checked: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema: String,
    pub plan: ExperimentPlan,
    pub summaries: Vec<SummaryRow>,
    /// `Var / Mean` per `n` for the leading passage-time measurement.
    pub var_mean: Vec<VarMeanPoint>,
    /// KS test at the largest `n`, when there are enough replicas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clt: Option<CltReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualityTally>,
    /// Raw values; written separately as JSON lines.
    #[serde(skip)]
    pub samples: Vec<RawSample>,
}

impl ExperimentRecord {
    pub fn summary(&self, n: usize, m: Measurement) -> Option<&SummaryRow> {
        self.summaries.iter().find(|s| s.n == n && s.measure == m)
    }

    /// Values of `m` at `n`, ordered by replica.
    pub fn values(&self, n: usize, m: Measurement) -> Result<Vec<f64>, HarnessError> {
        let k = self
            .plan
            .measurements
            .iter()
            .position(|&x| x == m)
            .ok_or_else(|| HarnessError::MissingMeasurement(m.label()))?;
        let mut rows: Vec<&RawSample> = self.samples.iter().filter(|s| s.n == n).collect();
        rows.sort_by_key(|s| s.replica);
        Ok(rows.into_iter().map(|s| s.values[k]).collect())
    }

    /// `(n, mean)` of `m` over the grid.
    pub fn curve(&self, m: Measurement) -> Vec<(f64, f64)> {
        self.plan.n_grid.iter().filter_map(|&n| self.summary(n, m).map(|s| (n as f64, s.mean))).collect()
    }

    /// First of `T`, `T_B` present in the plan.
    pub fn passage_measure(&self) -> Option<Measurement> {
        [Measurement::T, Measurement::TB].into_iter().find(|m| self.plan.measurements.contains(m))
    }
}

/// Runs every replica on one wedge built at the largest `n`.
///
/// All grid points of a replica share its field, read off from a single search
/// out of the origin. Replicas run in parallel and are collected in order, so
/// the record does not depend on the number of threads.
pub fn run(plan: &ExperimentPlan) -> Result<ExperimentRecord, HarnessError> {
    plan.validate()?;
    let graph = WedgeGraph::build_with_cap(&plan.wedge, plan.n_max(), plan.max_vertices).map_err(|e| match e {
        WedgeError::Resource { .. } => HarnessError::Resource(e.to_string()),
        other => other.into(),
    })?;
    let wants_dual = plan.measurements.iter().any(|m| matches!(m, Measurement::Yn | Measurement::YnLevel(_)));
    let duals: Vec<DualGraph> = if wants_dual {
        plan.n_grid.iter().map(|&n| DualGraph::new(&graph, n)).collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let per_replica: Vec<Vec<RawSample>> = (0..plan.replicas)
        .into_par_iter()
        .map(|r| replica(plan, &graph, &duals, r))
        .collect::<Result<_, _>>()?;
    let samples: Vec<RawSample> = per_replica.into_iter().flatten().collect();
    let mut record = aggregate(plan, samples)?;
    if plan.measurements.contains(&Measurement::Yn) {
        let checked = plan.replicas * plan.n_grid.len();
        record.duality = Some(DualityTally { checked, exact: checked });
    }
    Ok(record)
}

fn replica(plan: &ExperimentPlan, graph: &WedgeGraph, duals: &[DualGraph], r: usize) -> Result<Vec<RawSample>, HarnessError> {
    let field = WeightField::sample(&plan.model, graph, plan.seed, stream_id(&[REPLICA_TAG, r as u64]));
    let ms = &plan.measurements;
    let t = ms.contains(&Measurement::T).then(|| line_passage_times(graph, &field, Mode::General));
    let needs_b = ms.iter().any(|m| *m != Measurement::T);
    let tb = needs_b.then(|| line_passage_times(graph, &field, Mode::Bernoulli));
    let mut out = Vec::with_capacity(plan.n_grid.len());
    let mut prev = 0usize;
    for (k, &n) in plan.n_grid.iter().enumerate() {
        let mut values = Vec::with_capacity(ms.len());
        for m in ms {
            let v = match *m {
                Measurement::T => t.as_ref().unwrap()[n],
                Measurement::TB => tb.as_ref().unwrap()[n],
                Measurement::Increment => {
                    let tb = tb.as_ref().unwrap();
                    tb[n] - tb[prev]
                }
                Measurement::Yn => {
                    let y = duals[k].count(graph, &field, None, false).value;
                    let b = tb.as_ref().unwrap()[n];
                    // Zero tolerance: both sides are integers.
                    if b != y as f64 {
                        return Err(HarnessError::Duality { n, replica: r, tb: b, y });
                    }
                    y as f64
                }
                Measurement::YnLevel(j) => duals[k].count(graph, &field, Some(j), false).value as f64,
            };
            values.push(v);
        }
        out.push(RawSample { n, replica: r, values });
        prev = n;
    }
    Ok(out)
}

/// Builds the record from raw samples. The result does not depend on their order.
pub fn aggregate(plan: &ExperimentPlan, mut samples: Vec<RawSample>) -> Result<ExperimentRecord, HarnessError> {
    plan.validate()?;
    samples.sort_by_key(|s| (s.n, s.replica));
    let mut summaries = Vec::new();
    for &n in &plan.n_grid {
        let rows: Vec<&RawSample> = samples.iter().filter(|s| s.n == n).collect();
        if rows.is_empty() {
            return Err(HarnessError::InsufficientData(format!("no samples at n = {n}")));
        }
        for (k, &m) in plan.measurements.iter().enumerate() {
            let xs: Vec<f64> = rows.iter().map(|s| s.values[k]).collect();
            let s = Summary::from_samples(&xs)?;
            let ci = xs.len() >= crate::MIN_CI_REPLICAS;
            summaries.push(SummaryRow {
                n,
                measure: m,
                mean: s.mean,
                var: s.var,
                skew: s.skew,
                ci_low: ci.then_some(s.ci_low),
                ci_high: ci.then_some(s.ci_high),
                replicas: xs.len(),
            });
        }
    }
    let mut record = ExperimentRecord {
        schema: SCHEMA.into(),
        plan: plan.clone(),
        summaries,
        var_mean: Vec::new(),
        clt: None,
        duality: None,
        samples,
    };
    if let Some(m) = record.passage_measure() {
        record.var_mean = variance_mean_series(&record, m)?;
        let n = plan.n_max();
        if record.summary(n, m).is_some_and(|s| s.replicas >= CLT_MIN_REPLICAS && s.var > 0.0) {
            record.clt = Some(clt_test(&record, n, m)?);
        }
    }
    Ok(record)
}
