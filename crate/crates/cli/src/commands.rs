use fpp_core::top_down_crossing_exists;
use harness::{
    clt_test, run, variance_mean_test, write_jsonl, write_summary_csv, ExperimentPlan, HarnessError, Measurement,
    VerdictStatus,
};
use mc_stats::{wilson_interval, Z95};
use martingale::oracle::{block_edges, certify_random};
use martingale::{interior, leftmost_crossing, summarize, MartError, Martingale, MartingaleConfig};
use perc_stats::{calibrate_balanced_constant, estimate_xi, sponge_phase_scan, PhaseVerdict, SpongeGrowth, XiTarget};
use randomness::{WeightField, WeightModel};
use regimes::{classify, fit_against_rate, FitVerdict, GrowthRegime, RegimeError, XiInput};
use sequences::{audit_assumptions, build_sequence, AuditConfig, Regime};
use serde_json::json;
use wedge::WedgeGraph;

use crate::config::*;
use crate::output::{csv_schema_line, document, OutDir};
use crate::{report, CliError};

/// Settings of the correlation-length estimate used when none is supplied.
pub const XI_NMAX: usize = 16;
pub const XI_SAMPLES: u64 = 100_000;
/// Largest block, in edges, that `crossing --certify` enumerates.
pub const CERTIFY_MAX_EDGES: usize = 40;

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// One-line summary for stdout.
    pub line: String,
    /// Statistical checks that failed.
    pub failures: Vec<String>,
    /// Non-fatal problems.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(line: String) -> Self {
        Outcome { line, failures: Vec::new(), warnings: Vec::new() }
    }
}

/// Runs a configuration on a pool of `cfg.workers` threads.
///
/// The config is archived as `config.json` before any work starts.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let out = OutDir::new(cfg.out.as_deref())?;
    let mut archived = serde_json::to_string_pretty(cfg)?;
    archived.push('\n');
    out.write(CONFIG_FILE, archived.as_bytes())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Resource(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| dispatch(cfg, &out))
}

fn dispatch(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Simulate(a) => simulate(cfg, a, out),
        Command::DualityCheck(a) => duality(cfg, a, out),
        Command::Xi(a) => xi(cfg, a, out),
        Command::Crossing(a) => crossing(cfg, a, out),
        Command::Sponge(a) => sponge(cfg, a, out),
        Command::Sequence(a) => sequence(cfg, a, out),
        Command::Martingale(a) => martingale_cmd(cfg, a, out),
        Command::Classify(a) => classify_cmd(cfg, a, out),
        Command::Clt(a) => clt(cfg, a, out),
        Command::Report(a) => report::report(a, out),
    }
}

fn check_p(p: f64) -> Result<(), CliError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("--p must lie in (0, 1), got {p}")))
    }
}

/// Correlation length at `1 - p`, estimated from the point-to-plane decay.
fn dual_xi(p: f64, seed: u64) -> Result<XiInput, CliError> {
    let e = estimate_xi(1.0 - p, XI_NMAX, XI_SAMPLES, seed, XiTarget::PointToPlane)?;
    Ok(XiInput { value: e.xi, ci: e.ci() })
}

/// `xi` from the flags when given, else estimated when `p > 1/2`.
fn resolve_xi(p: f64, xi: Option<f64>, ci: f64, seed: u64) -> Result<Option<XiInput>, CliError> {
    match xi {
        Some(value) => Ok(Some(XiInput { value, ci })),
        None if p > 0.5 => dual_xi(p, seed).map(Some),
        None => Ok(None),
    }
}

fn plan(cfg: &RunConfig, wedge: &WedgeArgs, model: WeightModel, n: Vec<usize>, replicas: usize, ms: &[Measurement]) -> Result<ExperimentPlan, CliError> {
    let mut plan = ExperimentPlan::new(wedge.function()?, model, n, replicas, cfg.seed).with_measurements(ms);
    plan.max_vertices = cfg.max_vertices;
    plan.validate()?;
    Ok(plan)
}

fn simulate(cfg: &RunConfig, a: &SimulateArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    let plan = plan(cfg, &a.wedge, a.law.model(a.p)?, a.n.clone(), a.replicas, &a.measure)?;
    let xi = resolve_xi(a.p, a.xi, a.xi_ci, cfg.seed)?;
    let class = classify(a.wedge.a, a.wedge.b, a.p, xi)?;
    let rec = run(&plan)?;

    let mut warnings = Vec::new();
    let mut failures = Vec::new();
    let m = rec.passage_measure();
    let fit = match m.map(|m| fit_against_rate(&rec.curve(m), &class.regime)) {
        Some(Ok(f)) => Some(f),
        Some(Err(RegimeError::InsufficientData(msg))) | Some(Err(RegimeError::Domain(msg))) => {
            warnings.push(format!("no rate fit: {msg}"));
            None
        }
        Some(Err(e)) => return Err(e.into()),
        None => None,
    };
    let vm = match m.map(|m| variance_mean_test(&rec, m, &class.regime)) {
        Some(Ok(v)) => Some(v),
        Some(Err(HarnessError::InsufficientData(msg))) => {
            warnings.push(format!("no variance/mean verdict: {msg}"));
            None
        }
        Some(Err(e)) => return Err(e.into()),
        None => None,
    };
    if fit.as_ref().is_some_and(|f| f.verdict == FitVerdict::RegimeMismatch) {
        failures.push(format!("curve does not follow the {} rate", class.regime.name()));
    }
    if let Some(v) = &vm {
        match v.status {
            VerdictStatus::Fail => failures.push(format!("Var/Mean band {:.3}, trend slope {:.3}", v.band_ratio, v.trend_slope)),
            VerdictStatus::Skipped => warnings.push(v.notice.clone().unwrap_or_default()),
            VerdictStatus::Pass => {}
        }
    }
    if let Some(c) = rec.clt.as_ref().filter(|c| !c.pass) {
        failures.push(format!("KS p-value {:.4} at n = {}", c.p_value, c.n));
    }

    let mut buf = Vec::new();
    write_jsonl(&rec, &mut buf)?;
    out.write("samples.jsonl", &buf)?;
    let mut buf = Vec::new();
    write_summary_csv(&rec, &mut buf)?;
    out.write("summary.csv", &buf)?;
    out.write_json(
        "result.json",
        "simulate",
        &json!({ "record": rec, "classification": class, "fit": fit, "variance_mean": vm }),
    )?;
    let n_max = plan.n_max();
    let tail = m
        .and_then(|m| rec.summary(n_max, m))
        .map(|s| format!(", mean {} at n = {n_max}: {:.4}", s.measure, s.mean))
        .unwrap_or_default();
    Ok(Outcome {
        line: format!("simulate: {} widths x {} replicas, regime {}{tail}", plan.n_grid.len(), plan.replicas, class.regime.name()),
        failures,
        warnings,
    })
}

fn duality(cfg: &RunConfig, a: &DualityArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    let plan = plan(cfg, &a.wedge, WeightModel::constant(a.p), vec![a.n], a.replicas, &[Measurement::TB, Measurement::Yn])?;
    let rec = run(&plan)?;
    let tally = rec.duality.unwrap_or_default();
    out.write_json("duality.json", "duality-check", &json!({ "n": a.n, "p": a.p, "tally": tally }))?;
    Ok(Outcome::new(format!("{}/{} exact", tally.exact, tally.checked)))
}

fn xi(cfg: &RunConfig, a: &XiArgs, out: &OutDir) -> Result<Outcome, CliError> {
    let target = match a.target {
        TargetArg::Plane => XiTarget::PointToPlane,
        TargetArg::Point => XiTarget::PointToPoint,
    };
    let e = estimate_xi(a.p, a.nmax, a.samples, cfg.seed, target)?;
    let mut csv = csv_schema_line();
    csv.push_str("n,estimate,ci_low,ci_high,samples\n");
    for pt in &e.points {
        csv.push_str(&format!("{},{},{},{},{}\n", pt.n, pt.estimate, pt.ci_low, pt.ci_high, pt.samples));
    }
    out.write("xi_curve.csv", csv.as_bytes())?;
    out.write_json("xi.json", "xi", &e)?;
    Ok(Outcome::new(format!(
        "xi({}) = {:.4} +- {:.4} over n in [{}, {}]",
        a.p,
        e.xi,
        e.ci(),
        e.n_window.0,
        e.n_window.1
    )))
}

fn crossing(cfg: &RunConfig, a: &CrossingArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    if a.lo >= a.hi || a.samples == 0 {
        return Err(CliError::Validation(format!("need lo < hi and samples > 0, got [{}, {}]", a.lo, a.hi)));
    }
    let graph = WedgeGraph::build_with_cap(&a.wedge.function()?, a.hi, cfg.max_vertices)?;
    let model = WeightModel::constant(a.p);
    let mut hits = 0u64;
    let mut first = None;
    for k in 0..a.samples {
        let field = WeightField::sample_columns(&model, &graph, cfg.seed, k, a.lo, a.hi);
        if top_down_crossing_exists(&graph, &field, a.lo, a.hi) {
            hits += 1;
            if first.is_none() {
                let path = leftmost_crossing(&graph, &field, a.lo, a.hi)?;
                let area = interior(&graph, a.lo, &path)?;
                let coords: Vec<(usize, usize)> = path.iter().map(|&v| graph.coords(v)).collect();
                first = Some(json!({ "sample": k, "path": coords, "interior_faces": area.faces, "interior_measure": area.measure }));
            }
        }
    }
    let (lo, hi) = wilson_interval(hits, a.samples, Z95);
    let mut outcome = Outcome::new(format!(
        "crossing of columns [{}, {}]: {hits}/{} samples, p_hat = {:.4}",
        a.lo,
        a.hi,
        a.samples,
        hits as f64 / a.samples as f64
    ));
    let certification = if a.certify {
        let edges = block_edges(&graph, a.lo, a.hi).len();
        if edges > CERTIFY_MAX_EDGES {
            return Err(CliError::Validation(format!("block has {edges} edges, certification enumerates at most {CERTIFY_MAX_EDGES}")));
        }
        let c = certify_random(&graph, a.lo, a.hi, a.p, a.samples as usize, cfg.seed)?;
        if c.mismatches > 0 {
            outcome.failures.push(format!("{} of {} configurations disagree with exhaustive search", c.mismatches, c.configs));
        }
        if c.ties > 0 {
            outcome.warnings.push(format!("{} configurations have tied minimal interiors", c.ties));
        }
        outcome.line.push_str(&format!(", certified {}/{}", c.configs - c.mismatches, c.configs));
        Some(c)
    } else {
        None
    };
    out.write_json(
        "crossing.json",
        "crossing",
        &json!({
            "lo": a.lo, "hi": a.hi, "p": a.p, "samples": a.samples, "hits": hits,
            "estimate": hits as f64 / a.samples as f64, "ci_low": lo, "ci_high": hi,
            "leftmost": first, "certification": certification,
        }),
    )?;
    Ok(outcome)
}

fn sponge(cfg: &RunConfig, a: &SpongeArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    if a.n.is_empty() || a.n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Validation("--n must be strictly increasing".into()));
    }
    let xi = match a.xi {
        Some(x) => x,
        None => estimate_xi(a.p, XI_NMAX, XI_SAMPLES, cfg.seed, XiTarget::PointToPlane)?.xi,
    };
    let growth = match a.growth {
        GrowthArg::Thin => SpongeGrowth::Thin,
        GrowthArg::Thick => SpongeGrowth::Thick,
        GrowthArg::Balanced => {
            let c = match a.c {
                Some(c) => c,
                None => calibrate_balanced_constant(a.p, xi, a.n_ref.unwrap_or(a.n[a.n.len() / 2]), a.samples, cfg.seed)?,
            };
            SpongeGrowth::Balanced { c }
        }
    };
    let scan = sponge_phase_scan(a.p, xi, growth, &a.n, a.samples, cfg.seed, a.max_height)?;
    out.write("sponge.csv", scan.to_csv(&csv_schema_line()).as_bytes())?;
    out.write_json("sponge.json", "sponge", &scan)?;
    let mut outcome = Outcome::new(format!("sponge {:?}: predicted {:?}, observed {:?}", a.growth, scan.predicted, scan.observed));
    if scan.predicted != scan.observed {
        outcome.failures.push(format!("observed {:?} but the driver predicts {:?}", scan.observed, scan.predicted));
    }
    if scan.predicted == PhaseVerdict::Intermediate && scan.rows.iter().any(|r| !(0.05..=0.95).contains(&r.crossing.estimate)) {
        outcome.failures.push("balanced crossing probabilities leave [0.05, 0.95]".into());
    }
    Ok(outcome)
}

fn build(case: Case, wedge: &WedgeArgs, p: f64, xi: Option<f64>, seed: u64, len: usize) -> Result<sequences::BlockSequence, CliError> {
    check_p(p)?;
    let regime = case.regime();
    let xi = match (regime, xi) {
        (Regime::Critical, _) => None,
        (_, Some(x)) => Some(x),
        (_, None) => Some(dual_xi(p, seed)?.value),
    };
    Ok(build_sequence(&wedge.function()?, p, xi, regime, len)?)
}

fn sequence(cfg: &RunConfig, a: &SequenceArgs, out: &OutDir) -> Result<Outcome, CliError> {
    let seq = build(a.case, &a.wedge, a.p, a.xi, cfg.seed, a.imax)?;
    let mut outcome = Outcome::new(format!(
        "sequence case {}: {} entries, r_last = {}, audit index {:?}",
        a.case.regime().case_label(),
        seq.len(),
        seq.r.last().copied().unwrap_or(0),
        seq.audit_index()
    ));
    let audit = if a.audit {
        let i_lo = a.ilo.or(seq.audit_index()).unwrap_or(0);
        let last = seq.len().saturating_sub(2);
        let i_hi = a.ihi.unwrap_or((i_lo + 10).min(last));
        let ac = AuditConfig { i_lo, i_hi, samples: a.samples, m_list: a.m.clone(), seed: cfg.seed, c1: None, c2: None };
        if let Some(&r) = seq.r.get(i_hi + 1) {
            if r > cfg.max_vertices {
                // The sequence itself is still written.
                out.write_json("sequence.json", "sequence", &json!({ "r": seq.r, "sequence": seq, "audit": null }))?;
                return Err(CliError::Resource(format!("auditing up to r = {r} exceeds the vertex cap {}", cfg.max_vertices)));
            }
        }
        let audit = audit_assumptions(&seq, &WeightModel::constant(seq.p), &ac)?;
        for (ok, what) in [(audit.a1_pass, "A1"), (audit.lemma_pass, "increment bound"), (audit.a3_pass, "A3")] {
            if !ok {
                outcome.failures.push(format!("{what} audit failed on blocks {i_lo}..={i_hi}"));
            }
        }
        outcome.line.push_str(&format!(", min A1 {:.3}, max A2 {:.3}", audit.a1_min, audit.a2_max));
        Some(audit)
    } else {
        None
    };
    out.write_json("sequence.json", "sequence", &json!({ "r": seq.r, "sequence": seq, "audit": audit }))?;
    Ok(outcome)
}

fn martingale_cmd(cfg: &RunConfig, a: &MartingaleArgs, out: &OutDir) -> Result<Outcome, CliError> {
    let seq = build(a.case, &a.wedge, a.p, a.xi, cfg.seed, Martingale::required_len(a.i0, a.cap))?;
    let from_i = seq.audit_index().unwrap_or(0);
    let model = a.law.model(a.p)?;
    let eta = match model.law {
        randomness::PositiveLaw::ParetoTail { exponent, .. } => Some(exponent - 0.5),
        _ => None,
    };
    let mc = MartingaleConfig { i0: a.i0, outer: a.outer, inner: a.inner, cap: a.cap, seed: cfg.seed, ..Default::default() };
    let mart = match Martingale::new(seq, model, mc) {
        Err(MartError::Wedge(e)) => return Err(CliError::Resource(format!("martingale needs a wedge too large to build: {e}"))),
        other => other?,
    };
    let records = mart.run()?;
    let summary = summarize(&records, from_i.min(a.i0), eta)?;
    let mut lines = String::new();
    for r in &records {
        lines.push_str(&serde_json::to_string(&document("outer", r)?)?);
        lines.push('\n');
    }
    out.write("martingale.jsonl", lines.as_bytes())?;
    out.write_json("martingale_summary.json", "martingale-summary", &summary)?;
    let mut outcome = Outcome::new(format!(
        "martingale: {} outer x {} inner, i0 = {}, telescoping {}, means {}",
        a.outer,
        a.inner,
        a.i0,
        if summary.telescoping.pass { "pass" } else { "fail" },
        if summary.means_pass { "pass" } else { "fail" }
    ));
    if !summary.telescoping.pass {
        outcome.failures.push("telescoping sum misses T - E T".into());
    }
    if !summary.means_pass {
        outcome.failures.push("some increment mean is more than 3 SE from 0".into());
    }
    Ok(outcome)
}

fn classify_cmd(cfg: &RunConfig, a: &ClassifyArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    let xi = resolve_xi(a.p, a.xi, a.xi_ci, cfg.seed)?;
    let c = classify(a.a, a.b, a.p, xi)?;
    let doc = json!({ "regime": c.regime.name(), "classification": c });
    out.write_json("classify.json", "classify", &doc)?;
    let mut outcome = Outcome::new(serde_json::to_string(&document("classify", &doc)?)?);
    if c.ambiguous {
        outcome.warnings.push("a is within two CI half-widths of xi; the verdict could flip".into());
    }
    Ok(outcome)
}

fn clt(cfg: &RunConfig, a: &CltArgs, out: &OutDir) -> Result<Outcome, CliError> {
    check_p(a.p)?;
    if a.replicas < harness::CLT_MIN_REPLICAS {
        return Err(CliError::Validation(format!("the KS test needs at least {} replicas", harness::CLT_MIN_REPLICAS)));
    }
    let plan = plan(cfg, &a.wedge, a.law.model(a.p)?, vec![a.n], a.replicas, &[Measurement::T])?;
    let rec = run(&plan)?;
    let report = match clt_test(&rec, a.n, Measurement::T) {
        Err(HarnessError::Degenerate(m)) => return Err(CliError::Validation(m)),
        other => other?,
    };
    out.write_json("clt.json", "clt", &report)?;
    let mut outcome = Outcome::new(format!("clt at n = {}: KS D = {:.4}, p = {:.4}", a.n, report.statistic, report.p_value));
    if !report.pass {
        outcome.failures.push(format!("KS p-value {:.4} below 0.01", report.p_value));
    }
    Ok(outcome)
}

/// Regime used for reports when only the record is at hand.
pub fn regime_of(doc: &serde_json::Value) -> Option<GrowthRegime> {
    serde_json::from_value(doc.get("classification")?.get("regime")?.clone()).ok()
}
