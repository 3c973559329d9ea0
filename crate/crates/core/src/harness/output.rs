//! CSV, JSON and gnuplot writers. Every writer formats floats with the
//! shortest round-trip representation, so equal inputs give equal bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CSV_HEADER: &str = "experiment_id,eps,t,quantity,value";

/// One row of the fixed CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub eps: f64,
    pub t: f64,
    pub quantity: String,
    pub value: f64,
}

impl SeriesRow {
    pub fn new(eps: f64, t: f64, quantity: impl Into<String>, value: f64) -> Self {
        Self {
            eps,
            t,
            quantity: quantity.into(),
            value,
        }
    }
}

pub fn csv_text(experiment_id: &str, rows: &[SeriesRow]) -> String {
    let mut s = String::with_capacity(48 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{experiment_id},{},{},{},{}", r.eps, r.t, r.quantity, r.value);
    }
    s
}

pub fn write_csv(path: &Path, experiment_id: &str, rows: &[SeriesRow]) -> Result<()> {
    std::fs::write(path, csv_text(experiment_id, rows))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Two whitespace-separated columns with a comment header.
pub fn write_columns(path: &Path, header: &str, x: &[f64], y: &[f64]) -> Result<()> {
    let mut s = format!("# {header}\n");
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(s, "{a} {b}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Creates `dir` and fails early when it cannot be written to.
pub fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let probe = dir.join(".write-probe");
    std::fs::write(&probe, b"")?;
    std::fs::remove_file(probe)?;
    Ok(())
}
