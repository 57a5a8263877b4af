//! Markdown summary and plot-ready CSVs from the artifacts of earlier runs.

use std::fmt::Write as _;
use std::path::Path;

use harness::{ExperimentRecord, Measurement};
use sequences::BlockSequence;
use serde_json::Value;

use crate::commands::{regime_of, Outcome};
use crate::config::ReportArgs;
use crate::output::{csv_schema_line, OutDir};
use crate::CliError;

fn load(dir: &Path, name: &str, warnings: &mut Vec<String>) -> Option<Value> {
    let path = dir.join(name);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(_) => {
            warnings.push(format!("{name} not found"));
            return None;
        }
    };
    match serde_json::from_str::<Value>(&text) {
        Ok(v) if v.get("schema").and_then(Value::as_str) == Some(harness::SCHEMA) => Some(v),
        Ok(_) => {
            warnings.push(format!("{name} has no {} schema tag; skipped", harness::SCHEMA));
            None
        }
        Err(e) => {
            warnings.push(format!("{name} is not valid JSON ({e}); skipped"));
            None
        }
    }
}

fn num(v: &Value, path: &[&str]) -> String {
    let mut cur = v;
    for k in path {
        match cur.get(k) {
            Some(x) => cur = x,
            None => return "-".into(),
        }
    }
    match cur {
        Value::Number(n) => n.as_f64().map(|x| format!("{x:.4}")).unwrap_or_else(|| n.to_string()),
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn report(a: &ReportArgs, out: &OutDir) -> Result<Outcome, CliError> {
    if !a.dir.is_dir() {
        return Err(CliError::Validation(format!("{} is not a directory", a.dir.display())));
    }
    let target = match out.path() {
        Some(_) => out.clone(),
        None => OutDir::new(Some(&a.dir))?,
    };
    let mut warnings = Vec::new();
    let mut md = format!("# wedge-fpp report\n\nschema: {}\n\n", harness::SCHEMA);
    let mut sections = 0;

    let sequence = load(&a.dir, "sequence.json", &mut warnings);
    let seq: Option<BlockSequence> = sequence.as_ref().and_then(|s| serde_json::from_value(s["sequence"].clone()).ok());

    if let Some(doc) = load(&a.dir, "result.json", &mut warnings) {
        sections += 1;
        let regime = regime_of(&doc);
        let rec: Option<ExperimentRecord> = serde_json::from_value(doc["record"].clone()).ok();
        md.push_str("## Growth rate\n\n| regime | rate | verdict | trend slope | ratio band (min, max)/mean | log-log slope |\n|---|---|---|---|---|---|\n");
        let fit = &doc["fit"];
        let band = match (fit["band"].get(0), fit["band"].get(1)) {
            (Some(lo), Some(hi)) => format!("({}, {})", num(lo, &[]), num(hi, &[])),
            _ => "-".into(),
        };
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} |\n",
            regime.map(|r| r.name()).unwrap_or("-"),
            regime.map(|r| r.formula()).unwrap_or_else(|| "-".into()),
            num(fit, &["verdict"]),
            num(fit, &["trend_slope"]),
            band,
            num(fit, &["loglog_slope"]),
        );
        let vm = &doc["variance_mean"];
        md.push_str("## Variance and normality\n\n| Var/Mean band | trend slope | status | KS D | KS p |\n|---|---|---|---|---|\n");
        let clt = &doc["record"]["clt"];
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} |\n",
            num(vm, &["band_ratio"]),
            num(vm, &["trend_slope"]),
            num(vm, &["status"]),
            num(clt, &["statistic"]),
            num(clt, &["p_value"]),
        );
        if let Some(rec) = rec {
            match rec.passage_measure() {
                Some(m) => {
                    let mut csv = csv_schema_line();
                    csv.push_str("n,mean,ci_low,ci_high,rate\n");
                    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                    for &n in &rec.plan.n_grid {
                        if let Some(s) = rec.summary(n, m) {
                            let rate = regime.and_then(|r| r.rate(n as f64).ok());
                            let _ = writeln!(csv, "{n},{},{},{},{}", s.mean, opt(s.ci_low), opt(s.ci_high), opt(rate));
                        }
                    }
                    target.write("mean_curve.csv", csv.as_bytes())?;
                    if let Some(seq) = &seq {
                        write_var_iota(&rec, m, seq, &target, &mut warnings)?;
                    }
                }
                None => warnings.push("result.json has no passage-time measurement".into()),
            }
        } else {
            warnings.push("result.json holds no readable record".into());
        }
    }

    if let Some(doc) = load(&a.dir, "clt.json", &mut warnings) {
        sections += 1;
        md.push_str("## Normality at one width\n\n| n | replicas | skew | KS D | KS p | pass |\n|---|---|---|---|---|---|\n");
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} |\n",
            num(&doc, &["n"]),
            num(&doc, &["replicas"]),
            num(&doc, &["skew"]),
            num(&doc, &["statistic"]),
            num(&doc, &["p_value"]),
            num(&doc, &["pass"]),
        );
    }

    if let Some(doc) = &sequence {
        let audit = &doc["audit"];
        if audit.is_null() {
            warnings.push("sequence.json carries no audit".into());
        } else {
            sections += 1;
            md.push_str("## Assumption audit\n\n| blocks | min A1 | c1 | A1 | max A2 | fitted constant | increment bound | A3 |\n|---|---|---|---|---|---|---|---|\n");
            let _ = writeln!(
                md,
                "| {}..={} | {} | {} | {} | {} | {} | {} | {} |\n",
                num(audit, &["i_lo"]),
                num(audit, &["i_hi"]),
                num(audit, &["a1_min"]),
                num(audit, &["c1"]),
                num(audit, &["a1_pass"]),
                num(audit, &["a2_max"]),
                num(audit, &["lemma_constant"]),
                num(audit, &["lemma_pass"]),
                num(audit, &["a3_pass"]),
            );
        }
    }

    if let Some(doc) = load(&a.dir, "sponge.json", &mut warnings) {
        sections += 1;
        md.push_str("## Sponge scan\n\n| growth | xi | predicted | observed |\n|---|---|---|---|\n");
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} |\n",
            doc["growth"],
            num(&doc, &["xi"]),
            num(&doc, &["predicted"]),
            num(&doc, &["observed"])
        );
        let mut csv = csv_schema_line();
        csv.push_str("n,driver,p_hat\n");
        for r in doc["rows"].as_array().into_iter().flatten() {
            let _ = writeln!(csv, "{},{},{}", r["n"], r["driver"], r["crossing"]["estimate"]);
        }
        target.write("sponge_driver.csv", csv.as_bytes())?;
    }

    if let Some(doc) = load(&a.dir, "martingale_summary.json", &mut warnings) {
        sections += 1;
        md.push_str("## Martingale increments\n\n| outer | mean abs diff | mean SE | telescoping | means | max abs rho | E Delta^2 band |\n|---|---|---|---|---|---|---|\n");
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            num(&doc, &["telescoping", "outer"]),
            num(&doc, &["telescoping", "mean_abs_diff"]),
            num(&doc, &["telescoping", "mean_se"]),
            num(&doc, &["telescoping", "pass"]),
            num(&doc, &["means_pass"]),
            num(&doc, &["correlation", "max_abs_rho"]),
            num(&doc, &["moments", "band_ratio"]),
        );
    }

    if let Some(doc) = load(&a.dir, "duality.json", &mut warnings) {
        sections += 1;
        let _ = writeln!(
            md,
            "## Duality\n\n{}/{} replicas exact at n = {}\n",
            num(&doc, &["tally", "exact"]),
            num(&doc, &["tally", "checked"]),
            num(&doc, &["n"])
        );
    }

    if !warnings.is_empty() {
        md.push_str("## Warnings\n\n");
        for w in &warnings {
            let _ = writeln!(md, "- {w}");
        }
    }
    target.write("report.md", md.as_bytes())?;
    Ok(Outcome {
        line: format!("report: {sections} sections, {} warnings", warnings.len()),
        failures: Vec::new(),
        warnings,
    })
}

fn write_var_iota(rec: &ExperimentRecord, m: Measurement, seq: &BlockSequence, target: &OutDir, warnings: &mut Vec<String>) -> Result<(), CliError> {
    let mut csv = csv_schema_line();
    csv.push_str("n,var,iota\n");
    for &n in &rec.plan.n_grid {
        let (Some(s), Ok(iota)) = (rec.summary(n, m), seq.iota(n as u64)) else {
            warnings.push(format!("iota({n}) is beyond the archived sequence"));
            continue;
        };
        let _ = writeln!(csv, "{n},{},{iota}", s.var);
    }
    target.write("var_iota.csv", csv.as_bytes())
}
