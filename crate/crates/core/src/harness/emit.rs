use std::io::Write;
use std::path::Path;

use super::{Format, OutputSpec, ScenarioReport, TaskResult};
use crate::error::{Error, Result};

/// Serialized report: one JSON document, or one CSV table per task.
#[derive(Debug, Clone, PartialEq)]
pub enum Emitted {
    Json(String),
    /// `(file name, contents)` in task order.
    Csv(Vec<(String, String)>),
}

pub fn emit(report: &ScenarioReport, format: Format) -> Result<Emitted> {
    match format {
        Format::Json => Ok(Emitted::Json(to_json(report)?)),
        Format::Csv => report
            .results
            .iter()
            .enumerate()
            .map(|(i, r)| Ok((format!("{:02}_{}.csv", i + 1, r.result.task().name()), csv_table(&r.result)?)))
            .collect::<Result<Vec<_>>>()
            .map(Emitted::Csv),
    }
}

fn to_json(report: &ScenarioReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidScenario(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Write to `out.path` or to stdout. For CSV the path is a directory,
/// except that a single table may go to a path ending in `.csv`.
pub fn write_report(report: &ScenarioReport, out: &OutputSpec) -> Result<()> {
    match (emit(report, out.format)?, &out.path) {
        (Emitted::Json(s), Some(path)) => std::fs::write(path, s)?,
        (Emitted::Csv(files), Some(path))
            if files.len() == 1 && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) =>
        {
            std::fs::write(path, &files[0].1)?
        }
        (Emitted::Csv(files), Some(dir)) => {
            std::fs::create_dir_all(dir)?;
            for (name, body) in files {
                std::fs::write(Path::new(dir).join(name), body)?;
            }
        }
        (Emitted::Json(s), None) => std::io::stdout().lock().write_all(s.as_bytes())?,
        (Emitted::Csv(files), None) => {
            let mut lock = std::io::stdout().lock();
            if let [(_, body)] = files.as_slice() {
                lock.write_all(body.as_bytes())?;
            } else {
                for (i, (name, body)) in files.iter().enumerate() {
                    if i > 0 {
                        writeln!(lock)?;
                    }
                    writeln!(lock, "# {name}")?;
                    lock.write_all(body.as_bytes())?;
                }
            }
        }
    }
    Ok(())
}

/// Shortest round-trip form; exponent notation for very small or large
/// magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn csv_table(result: &TaskResult) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    match result {
        TaskResult::VerifyCommutant(r) => {
            w.write_record(["quantity", "value"]).map_err(csv_err)?;
            w.write_record(["max_commutator_norm".to_string(), num(r.max_commutator_norm)])
                .map_err(csv_err)?;
            w.write_record(["symmetry_dim".to_string(), r.symmetry_dim.to_string()])
                .map_err(csv_err)?;
            if let Some(e) = r.reconstruction_error {
                w.write_record(["reconstruction_error".to_string(), num(e)]).map_err(csv_err)?;
            }
            for (k, x) in r.embedding_roots.iter().flatten().enumerate() {
                w.write_record([format!("embedding_root_{}", k + 1), num(*x)]).map_err(csv_err)?;
            }
            for t in &r.triviality {
                w.write_record([format!("triviality_residual:{}", t.member), num(t.residual)])
                    .map_err(csv_err)?;
                let verdict = serde_json::to_value(t.verdict).map_err(|e| Error::Io(e.to_string()))?;
                w.write_record([format!("verdict:{}", t.member), verdict.as_str().unwrap_or("").to_string()])
                    .map_err(csv_err)?;
            }
        }
        TaskResult::Spectrum(r) => {
            let n = r.rows.iter().map(|row| row.levels.len()).max().unwrap_or(0);
            let mut header = vec!["u".to_string()];
            header.extend((1..=n).map(|k| format!("root_{k}")));
            header.push("residual".into());
            w.write_record(&header).map_err(csv_err)?;
            for row in &r.rows {
                let mut rec = vec![num(row.u)];
                rec.extend(row.levels.iter().map(|&x| num(x)));
                rec.push(row.residual.map(num).unwrap_or_default());
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
        TaskResult::Propagate(r) => {
            let mut header = vec!["from".to_string()];
            header.extend(r.labels.iter().cloned());
            w.write_record(&header).map_err(csv_err)?;
            for (row, &i) in r.probabilities.iter().zip(&r.initial) {
                let mut rec = vec![r.labels[i].clone()];
                rec.extend(row.iter().map(|&x| num(x)));
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.write_record(["row_defect".to_string(), num(r.row_defect)]).map_err(csv_err)?;
            w.write_record(["col_defect".to_string(), num(r.col_defect)]).map_err(csv_err)?;
            w.write_record(["max_norm_defect".to_string(), num(r.max_norm_defect)])
                .map_err(csv_err)?;
            if let Some(t) = r.tail_estimate {
                w.write_record(["tail_estimate".to_string(), num(t)]).map_err(csv_err)?;
            }
        }
        TaskResult::CompareClosedForm(r) => {
            w.write_record(["from", "to", "numeric", "closed_form", "residual"])
                .map_err(csv_err)?;
            for e in &r.entries {
                w.write_record([e.from.clone(), e.to.clone(), num(e.numeric), num(e.closed_form), num(e.residual)])
                    .map_err(csv_err)?;
            }
        }
        TaskResult::ConvergenceStudy(r) => {
            let t = &r.table;
            let mut header = vec!["cutoff".to_string()];
            header.extend(t.probes.iter().map(|(i, j)| format!("P({i}->{j})")));
            header.push("max_change".into());
            w.write_record(&header).map_err(csv_err)?;
            for (k, (c, vals)) in t.cutoffs.iter().zip(&t.values).enumerate() {
                let mut rec = vec![c.to_string()];
                rec.extend(vals.iter().map(|&x| num(x)));
                rec.push(if k == 0 { String::new() } else { num(t.differences[k - 1]) });
                w.write_record(&rec).map_err(csv_err)?;
            }
            if let Some(cf) = &r.closed_form {
                let mut rec = vec!["closed_form".to_string()];
                rec.extend(cf.iter().map(|&x| num(x)));
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
