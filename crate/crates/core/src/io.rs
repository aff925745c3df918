//! Text formats: weight vectors, gain patterns, and run reports.
//!
//! Weights are written with 17 significant digits so that reading them back
//! reproduces every double exactly.

use crate::beam::{BeamWeights, Scheme};
use crate::error::{Error, Result};
use crate::evaluator::{to_db, DesignReport, GainGrid};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const WEIGHTS_HEADER: &str = "index,real,imag";
pub const PATTERN_HEADER: &str = "theta,xi,gain_linear,gain_db";

pub fn write_weights<W: Write>(mut out: W, w: &BeamWeights) -> Result<()> {
    writeln!(out, "{WEIGHTS_HEADER}")?;
    for (i, x) in w.weights.iter().enumerate() {
        writeln!(out, "{i},{:.16e},{:.16e}", x.re, x.im)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_weights<R: Read>(input: R) -> Result<BeamWeights> {
    let mut lines = BufReader::new(input).lines();
    match lines.next().transpose()? {
        Some(h) if h.trim() == WEIGHTS_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header '{WEIGHTS_HEADER}', found {:?}",
                other.unwrap_or_default()
            )))
        }
    }
    let mut weights = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = lineno + 2;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {row}: expected 3 fields, got {}", fields.len())));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("line {row}: bad index '{}': {e}", fields[0])))?;
        if index != weights.len() {
            return Err(Error::Parse(format!(
                "line {row}: index {index} out of order, expected {}",
                weights.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("line {row}: bad number '{s}'")))
        };
        weights.push(Complex64::new(num(fields[1])?, num(fields[2])?));
    }
    if weights.is_empty() {
        return Err(Error::Parse("weights file has no rows".into()));
    }
    Ok(BeamWeights::raw(weights, Scheme::External))
}

pub fn save_weights(path: &Path, w: &BeamWeights) -> Result<()> {
    write_weights(BufWriter::new(File::create(path)?), w)
}

pub fn load_weights(path: &Path) -> Result<BeamWeights> {
    read_weights(File::open(path)?)
}

pub fn write_pattern<W: Write>(mut out: W, grid: &GainGrid) -> Result<()> {
    writeln!(out, "{PATTERN_HEADER}")?;
    for (t, x, g) in grid.iter() {
        writeln!(out, "{t:.16e},{x:.16e},{g:.16e},{:.10}", to_db(g))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_pattern(path: &Path, grid: &GainGrid) -> Result<()> {
    write_pattern(BufWriter::new(File::create(path)?), grid)
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `key = value` lines for the scenario and every report, followed by the same
/// content as one JSON line.
pub fn write_report<W: Write, S: Serialize>(mut out: W, scenario: &S, reports: &[DesignReport]) -> Result<()> {
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?;
            v["worst_case_gain_db"] = json!(r.worst_case_gain_db());
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let record = json!({
        "scenario": serde_json::to_value(scenario).map_err(|e| Error::Parse(e.to_string()))?,
        "reports": rows,
    });
    let mut pairs = Vec::new();
    flatten("", &record, &mut pairs);
    for (k, v) in pairs {
        writeln!(out, "{k} = {v}")?;
    }
    writeln!(out, "{record}")?;
    out.flush()?;
    Ok(())
}

pub fn save_report<S: Serialize>(path: &Path, scenario: &S, reports: &[DesignReport]) -> Result<()> {
    write_report(BufWriter::new(File::create(path)?), scenario, reports)
}
