use std::io::Write;

use serde_json::{Map, Value};

use crate::{ExperimentRecord, HarnessError};

/// Version tag carried by every JSON record and CSV file.
pub const SCHEMA: &str = "wedge-fpp/1";
pub const CSV_HEADER: &str = "n,measure,mean,var,ci_low,ci_high,replicas";

/// One JSON object per `(n, replica)`, ordered by `n` then replica.
pub fn write_jsonl(record: &ExperimentRecord, mut w: impl Write) -> Result<(), HarnessError> {
    for s in &record.samples {
        let mut obj = Map::new();
        obj.insert("schema".into(), SCHEMA.into());
        obj.insert("n".into(), s.n.into());
        obj.insert("replica".into(), s.replica.into());
        for (m, v) in record.plan.measurements.iter().zip(&s.values) {
            obj.insert(m.label(), Value::from(*v));
        }
        serde_json::to_writer(&mut w, &Value::Object(obj)).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Summary table with a leading schema comment. Missing CIs are left empty.
pub fn write_summary_csv(record: &ExperimentRecord, mut w: impl Write) -> Result<(), HarnessError> {
    writeln!(w, "# schema: {SCHEMA}")?;
    writeln!(w, "{CSV_HEADER}")?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for s in &record.summaries {
        writeln!(w, "{},{},{},{},{},{},{}", s.n, s.measure, s.mean, s.var, opt(s.ci_low), opt(s.ci_high), s.replicas)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{aggregate, ExperimentPlan, Measurement, RawSample};
    use randomness::WeightModel;
    use wedge::WedgeFunction;

    #[test]
    fn formats() {
        let plan = ExperimentPlan::new(WedgeFunction::LogLogLog { a: 1.0, b: 0.0 }, WeightModel::constant(0.5), vec![4], 2, 0)
            .with_measurements(&[Measurement::T, Measurement::Yn]);
        let samples = vec![
            RawSample { n: 4, replica: 1, values: vec![2.0, 2.0] },
            RawSample { n: 4, replica: 0, values: vec![1.0, 1.0] },
        ];
        let rec = aggregate(&plan, samples).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["schema"], SCHEMA);
        assert_eq!(first["replica"], 0);
        assert_eq!(first["Y_n"], 1.0);
        let mut buf = Vec::new();
        write_summary_csv(&rec, &mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# schema: wedge-fpp/1");
        assert_eq!(lines[1], CSV_HEADER);
        // Two replicas carry no CI.
        assert_eq!(lines[2], "4,T,1.5,0.5,,,2");
    }
}
