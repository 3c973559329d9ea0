//! Markdown summary of whatever results a directory holds.

use std::fmt::Write as _;
use std::path::Path;

use super::check::CheckReport;
use super::run::RunRecord;
use super::sweep::SweepReport;
use crate::error::{config, Result};

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Option<T>> {
    if !path.is_file() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path)?;
    Ok(Some(serde_json::from_str(&text)?))
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn run_section(out: &mut String, r: &RunRecord) {
    let _ = writeln!(
        out,
        "## Run `{}` ({}, eps = {}, mu = {})\n\nconfig hash `{}`, {} steps to t = {}, status {:?}\n",
        r.experiment_id,
        r.solver.as_str(),
        r.eps,
        r.mu,
        r.config_hash,
        r.steps,
        r.t_final,
        r.status
    );
    out.push_str("| verdict | value | limit | result |\n|---|---|---|---|\n");
    for v in &r.verdicts {
        let _ = writeln!(
            out,
            "| {} | {:.3e} | {:.1e} | {} |",
            v.name,
            v.value,
            v.limit,
            mark(v.pass)
        );
    }
    out.push('\n');
}

fn sweep_section(out: &mut String, s: &SweepReport) {
    let _ = writeln!(
        out,
        "## Sweep `{}`\n\neps = {:?}, complete: {}\n",
        s.experiment_id, s.eps, s.complete
    );
    for f in &s.failures {
        let _ = writeln!(out, "- failed: {f}");
    }
    out.push_str("| norm | slope | r^2 |\n|---|---|---|\n");
    for (k, f) in &s.fits {
        let _ = writeln!(out, "| {k} | {:.3} | {:.4} |", f.slope, f.r_squared);
    }
    let _ = writeln!(
        out,
        "\ndownwind-gradient norm decreasing in eps: {}",
        s.gradd_c_decreasing
    );
    if let Some(a) = &s.apriori {
        let _ = writeln!(out, "a priori uniformity: {}", mark(a.pass));
    }
    out.push_str("\n| eps | max relative slack |\n|---|---|\n");
    for e in &s.energy {
        let _ = writeln!(out, "| {} | {:.3e} |", e.eps, e.max_relative_slack);
    }
    out.push('\n');
}

fn check_section(out: &mut String, c: &CheckReport) {
    let _ = writeln!(out, "## Check `{}`: {}\n", c.suite, mark(c.pass));
    for v in &c.items {
        let _ = writeln!(
            out,
            "- {}: {:.3e} (limit {:.1e}) {}",
            v.name,
            v.value,
            v.limit,
            mark(v.pass)
        );
    }
    out.push('\n');
}

/// Renders `record.json`, `summary.json` and every `check_*.json` found in
/// `dir` into `report.md` and returns the text.
pub fn cmd_report(dir: &Path) -> Result<String> {
    if !dir.is_dir() {
        return config(format!("{} is not a directory", dir.display()));
    }
    let mut out = format!("# Results in {}\n\n", dir.display());
    let mut found = false;
    if let Some(r) = read::<RunRecord>(&dir.join("record.json"))? {
        run_section(&mut out, &r);
        found = true;
    }
    if let Some(s) = read::<SweepReport>(&dir.join("summary.json"))? {
        sweep_section(&mut out, &s);
        found = true;
    }
    let mut checks: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("check_") && n.ends_with(".json"))
        })
        .collect();
    checks.sort();
    for p in checks {
        if let Some(c) = read::<CheckReport>(&p)? {
            check_section(&mut out, &c);
            found = true;
        }
    }
    if !found {
        return config(format!("no results found in {}", dir.display()));
    }
    std::fs::write(dir.join("report.md"), &out)?;
    Ok(out)
}
