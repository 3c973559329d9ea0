//! Named property suites with machine-readable verdicts.

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SolverKind};
use super::output::{prepare_dir, write_json};
use super::run::{run_in_memory, RunRecord, Verdict};
use super::studies::{energy_study, max_principle_study, mu_study};
use crate::analysis::ladyzhenskaya_sample;
use crate::error::{config, Result};
use crate::fields::SpectralGrid;
use crate::mms::{spatial_study, temporal_study, Manufactured, MmsSystem};
use crate::model::{mollified_delta, mollifier_mass};

pub const SUITES: [&str; 9] = [
    "parity",
    "projection",
    "energy",
    "ladyzhenskaya",
    "mms",
    "mollifier",
    "max_principle",
    "mu_sweep",
    "coriolis",
];

pub const MMS_MIN_ORDER: f64 = 1.9;
pub const MMS_MIN_DROP: f64 = 10.0;
pub const MOLLIFIER_TOL: f64 = 1e-6;
pub const LADYZHENSKAYA_SAMPLES: usize = 1000;
pub const LADYZHENSKAYA_LIMIT: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub pass: bool,
    pub items: Vec<Verdict>,
    /// Suite-specific measurements behind the verdicts.
    pub details: serde_json::Value,
}

impl CheckReport {
    fn new(suite: &str, items: Vec<Verdict>, details: serde_json::Value) -> Self {
        Self {
            suite: suite.into(),
            pass: !items.is_empty() && items.iter().all(|v| v.pass),
            items,
            details,
        }
    }
}

/// Runs suite `name` from `cfg` and writes `check_<name>.json` to the
/// output directory.
pub fn cmd_check(name: &str, cfg: &RunConfig) -> Result<CheckReport> {
    let report = check_in_memory(name, cfg)?;
    let dir = cfg.output_path();
    prepare_dir(&dir)?;
    write_json(&dir.join(format!("check_{name}.json")), &report)?;
    Ok(report)
}

pub fn check_in_memory(name: &str, cfg: &RunConfig) -> Result<CheckReport> {
    if !SUITES.contains(&name) {
        return config(format!(
            "unknown check suite {name:?}; known suites: {}",
            SUITES.join(", ")
        ));
    }
    cfg.validate()?;
    match name {
        "parity" => structural(name, cfg, &["parity"]),
        "projection" => structural(name, cfg, &["divergence", "barotropic"]),
        "coriolis" => structural(name, cfg, &["coriolis_work"]),
        "energy" => energy(cfg),
        "ladyzhenskaya" => ladyzhenskaya(cfg),
        "mms" => mms(cfg),
        "mollifier" => mollifier(),
        "max_principle" => max_principle(cfg),
        _ => mu_sweep(cfg),
    }
}

fn both_runs(cfg: &RunConfig) -> Result<[RunRecord; 2]> {
    let mut a = cfg.clone();
    a.solver = SolverKind::Aniso;
    let mut h = cfg.clone();
    h.solver = SolverKind::Hydro;
    let (ra, rh) = rayon::join(|| run_in_memory(&a), || run_in_memory(&h));
    Ok([ra?, rh?])
}

/// Picks the named verdicts out of one anisotropic and one hydrostatic run.
fn structural(name: &str, cfg: &RunConfig, keys: &[&str]) -> Result<CheckReport> {
    let runs = both_runs(cfg)?;
    let mut items = Vec::new();
    for r in &runs {
        items.push(Verdict::flag(
            &format!("{}_completed", r.solver.as_str()),
            r.completed(),
        ));
        for k in keys {
            if let Some(v) = r.verdict(k) {
                let mut v = v.clone();
                v.name = format!("{}_{}", r.solver.as_str(), v.name);
                items.push(v);
            }
        }
    }
    Ok(CheckReport::new(
        name,
        items,
        serde_json::json!({ "t_final": [runs[0].t_final, runs[1].t_final] }),
    ))
}

fn energy(cfg: &RunConfig) -> Result<CheckReport> {
    let study = energy_study(cfg, cfg.params.eps, 3, None)?;
    let mut items = vec![Verdict::at_most(
        "relative_slack",
        study.max_relative_slack[0],
        super::run::ENERGY_TOL,
    )];
    for (i, r) in study.ratios.iter().enumerate() {
        items.push(Verdict::at_least(
            &format!("halving_ratio_{i}"),
            *r,
            super::studies::ENERGY_HALVING_MIN,
        ));
    }
    Ok(CheckReport::new("energy", items, serde_json::to_value(&study)?))
}

fn ladyzhenskaya(cfg: &RunConfig) -> Result<CheckReport> {
    let grid = cfg.grid()?;
    let stats = ladyzhenskaya_sample(&grid, cfg.seed, LADYZHENSKAYA_SAMPLES, cfg.bandlimit)?;
    let items = vec![
        Verdict::at_most("fh_max_over_median", stats.fh.max_over_median, LADYZHENSKAYA_LIMIT),
        Verdict::at_most("gh_max_over_median", stats.gh.max_over_median, LADYZHENSKAYA_LIMIT),
    ];
    Ok(CheckReport::new("ladyzhenskaya", items, serde_json::to_value(&stats)?))
}

/// Aspect ratio, grid and step ladders of the manufactured-solution suite.
const MMS_EPS: f64 = 0.2;
const MMS_GRID: usize = 16;
const MMS_DTS: [f64; 3] = [0.01, 0.005, 0.0025];
const MMS_T_END: f64 = 0.2;
const MMS_SIZES: [usize; 2] = [16, 24];
const MMS_SPATIAL_DT: f64 = 2e-3;
const MMS_SPATIAL_T_END: f64 = 0.02;

fn mms(cfg: &RunConfig) -> Result<CheckReport> {
    let params = cfg.params.with_eps(MMS_EPS);
    let grid = SpectralGrid::cubic(MMS_GRID, params.a)?;
    let systems = [("aniso", MmsSystem::Aniso), ("hydro", MmsSystem::Hydro { mu: 0.0 })];
    let results = systems
        .iter()
        .map(|&(label, system)| {
            let trig = Manufactured::new(params, system, 0.0)?;
            let smooth = Manufactured::new(params, system, 1.0)?;
            let (time, space) = rayon::join(
                || temporal_study(&trig, &grid, &MMS_DTS, MMS_T_END),
                || spatial_study(&smooth, &MMS_SIZES, MMS_SPATIAL_DT, MMS_SPATIAL_T_END),
            );
            Ok((label, time?, space?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut items = Vec::new();
    let mut details = serde_json::Map::new();
    for (label, time, space) in &results {
        items.push(Verdict::at_least(
            &format!("{label}_temporal_order"),
            time.min_rate(),
            MMS_MIN_ORDER,
        ));
        items.push(Verdict::at_least(
            &format!("{label}_spatial_drop"),
            space.rates[0],
            MMS_MIN_DROP,
        ));
        details.insert(
            label.to_string(),
            serde_json::json!({
                "dts": time.levels, "time_errors": time.errors, "orders": time.rates,
                "sizes": space.levels, "space_errors": space.errors,
            }),
        );
    }
    Ok(CheckReport::new("mms", items, details.into()))
}

/// Mollifier widths of the mass suite and the grid points per width.
const MOLLIFIER_WIDTHS: [f64; 3] = [0.2, 0.1, 0.05];
const MOLLIFIER_POINTS_PER_WIDTH: f64 = 20.0;

/// Quadrature oracle: the sampled mollifier integrates to the radial mass
/// at every width. Each width gets a box just deep enough to hold it and a
/// grid with a fixed number of points per width.
fn mollifier() -> Result<CheckReport> {
    let mass = mollifier_mass();
    let mut items = Vec::new();
    let mut integrals = Vec::new();
    for eps in MOLLIFIER_WIDTHS {
        let n = (MOLLIFIER_POINTS_PER_WIDTH / eps).round() as usize;
        let a = 1.25 * eps;
        let n3 = (2.0 * a * MOLLIFIER_POINTS_PER_WIDTH / eps).round() as usize;
        let grid = SpectralGrid::new(n, n, n3, a)?;
        let integral = mollified_delta(&grid, eps, [0.5, 0.5, 0.0])?.integral();
        items.push(Verdict::at_most(
            &format!("mass_error_eps{eps}"),
            (integral - mass).abs() / mass,
            MOLLIFIER_TOL,
        ));
        integrals.push(integral);
    }
    Ok(CheckReport::new(
        "mollifier",
        items,
        serde_json::json!({ "mass": mass, "widths": MOLLIFIER_WIDTHS, "integrals": integrals }),
    ))
}

fn max_principle(cfg: &RunConfig) -> Result<CheckReport> {
    let mut h = cfg.clone();
    h.solver = SolverKind::Hydro;
    let study = max_principle_study(&h)?;
    let items = vec![
        Verdict::at_most("margin", study.report.worst_margin.max(0.0), 0.0),
        Verdict::at_most("strong_margin", study.strong.worst_margin.max(0.0), 0.0),
        Verdict::flag("control_detected", !study.control.holds()),
    ];
    Ok(CheckReport::new("max_principle", items, serde_json::to_value(&study)?))
}

fn mu_sweep(cfg: &RunConfig) -> Result<CheckReport> {
    let study = mu_study(cfg, &cfg.mu_list)?;
    let items = vec![Verdict::flag("strictly_decreasing", study.decreasing)];
    Ok(CheckReport::new("mu_sweep", items, serde_json::to_value(&study)?))
}
