//! Output files: comma-separated tables and JSON documents. File names carry
//! the command or experiment name and the seed.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::checks::{CheckReport, EmpiricalGauge};
use crate::error::Result;
use crate::experiments::ExperimentResult;
use crate::geom::Point;

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub domain: Option<String>,
    pub map: Option<String>,
    pub seed: u64,
    pub level: u32,
    pub tol: f64,
    pub edge_tol: f64,
    pub out: String,
    pub params: Value,
}

pub fn stem(name: &str, seed: u64) -> String {
    format!("{name}_seed{seed}")
}

pub fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write_table(path: &FsPath, columns: &[String], rows: &[Vec<Value>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(cell))?;
    }
    w.flush()?;
    Ok(())
}

/// `<name>_seed<seed>.csv` with the rows and `<name>_seed<seed>.json` with
/// verdicts and manifest.
pub fn write_experiment(dir: &FsPath, res: &ExperimentResult, run: &RunManifest) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let base = stem(&res.name, res.manifest.seed);
    let csv_path = dir.join(format!("{base}.csv"));
    write_table(&csv_path, &res.columns, &res.rows)?;
    let json_path = dir.join(format!("{base}.json"));
    write_json(
        &json_path,
        &serde_json::json!({
            "experiment": res.name,
            "verdicts": res.verdicts,
            "manifest": res.manifest,
            "run": run,
        }),
    )?;
    Ok(vec![csv_path, json_path])
}

fn gauge_rows(g: &EmpiricalGauge) -> Vec<Vec<Value>> {
    (0..g.sup_values.len())
        .map(|i| {
            vec![
                Value::from(g.bins[i]),
                Value::from(g.bins[i + 1]),
                Value::from(g.counts[i]),
                g.sup_values[i].map_or(Value::Null, Value::from),
                g.monotone_envelope[i].map_or(Value::Null, Value::from),
            ]
        })
        .collect()
}

fn point_text(p: &Point) -> String {
    p.coords().iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(" ")
}

/// Report JSON, a witness table, and one table per gauge.
pub fn write_report(dir: &FsPath, report: &CheckReport, run: &RunManifest) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let base = stem(&report.check, report.manifest.seed);
    let json_path = dir.join(format!("{base}.json"));
    write_json(&json_path, &serde_json::json!({ "report": report, "run": run }))?;
    let wit_path = dir.join(format!("{base}_witnesses.csv"));
    let rows: Vec<Vec<Value>> = report
        .worst_witness
        .iter()
        .map(|w| {
            vec![
                Value::from(w.label.clone()),
                Value::from(w.value),
                w.bound.map_or(Value::Null, Value::from),
                Value::from(w.points.iter().map(point_text).collect::<Vec<_>>().join(";")),
            ]
        })
        .collect();
    let cols: Vec<String> = ["label", "value", "bound", "points"].iter().map(|s| s.to_string()).collect();
    write_table(&wit_path, &cols, &rows)?;
    let mut out = vec![json_path, wit_path];
    let gcols: Vec<String> = ["bin_lo", "bin_hi", "count", "sup", "envelope"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for g in &report.gauges {
        let p = dir.join(format!("{base}_{}_gauge.csv", g.name));
        write_table(&p, &gcols, &gauge_rows(g))?;
        out.push(p);
    }
    Ok(out)
}

/// Path vertices as `x,y[,z]` rows.
pub fn write_path(path: &FsPath, pts: &[Point]) -> Result<()> {
    let dim = pts.first().map_or(2, |p| p.dim());
    let cols: Vec<String> = ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<Value>> = pts
        .iter()
        .map(|p| p.coords().iter().map(|&c| Value::from(c)).collect())
        .collect();
    write_table(path, &cols, &rows)
}
