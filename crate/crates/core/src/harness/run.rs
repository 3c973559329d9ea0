//! Single runs of either solver with streaming monitors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SolverKind};
use super::output::{prepare_dir, write_csv, write_json, SeriesRow};
use crate::analysis::{physical_concentration, AprioriMonitor, EnergyMonitor, MaxPrincipleMonitor, TracerBudget};
use crate::aniso::{coriolis_work, courant, init_random_state, AnisoSolver, AnisoState, StepControl};
use crate::error::{Error, Result};
use crate::fields::snapshot::save_snapshot;
use crate::fields::{Field, SpectralGrid};
use crate::forcing::{Forcing, SteadySource};
use crate::hydro::{HydroOptions, HydroSolver, HydroState, SurfaceField};
use crate::model::{build_source, PhysicalParams, SourcePair};

/// Divergence, parity and barotropic residual limit.
pub const STRUCTURE_TOL: f64 = 1e-10;
pub const CORIOLIS_TOL: f64 = 1e-12;
/// Largest admissible relative energy-inequality violation.
pub const ENERGY_TOL: f64 = 1e-3;
/// Per-step tracer budget residual relative to `1 + dt ||s||_L1`.
pub const BUDGET_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Failed { last_stable_time: f64, error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value >= limit,
        }
    }

    pub fn flag(name: &str, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            limit: 1.0,
            pass,
        }
    }
}

/// Outcome of one solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment_id: String,
    pub config_hash: String,
    pub solver: SolverKind,
    pub eps: f64,
    pub mu: f64,
    pub grid: [usize; 3],
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    pub status: RunStatus,
    pub verdicts: Vec<Verdict>,
    pub series: Vec<SeriesRow>,
    /// Relative to the output directory.
    pub snapshots: Vec<PathBuf>,
    /// Kept out of the record file so records are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time: f64,
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Completed with every verdict passing.
    pub fn passed(&self) -> bool {
        self.completed() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Initial data and sources shared by every member of an experiment.
pub(crate) struct Prepared {
    pub grid: SpectralGrid,
    pub init: AnisoState,
    pub sources: SourcePair,
}

pub(crate) fn prepare(cfg: &RunConfig, eps: f64) -> Result<Prepared> {
    let grid = cfg.grid()?;
    let init = init_random_state(&grid, cfg.seed, cfg.amplitude, cfg.bandlimit)?;
    let sources = build_source(&cfg.source.spec(&grid, eps), &grid)?;
    Ok(Prepared { grid, init, sources })
}

pub(crate) fn hydro_initial(a: &AnisoState) -> HydroState {
    HydroState {
        u1: a.u1.clone(),
        u2: a.u2.clone(),
        c: a.c.clone(),
        p_s: SurfaceField::zeros(a.grid()),
        t: a.t,
    }
}

/// How far a run got.
pub(crate) struct Outcome {
    pub steps: usize,
    pub t: f64,
    pub error: Option<String>,
}

impl Outcome {
    pub fn status(&self) -> RunStatus {
        match &self.error {
            None => RunStatus::Completed,
            Some(e) => RunStatus::Failed {
                last_stable_time: self.t,
                error: e.clone(),
            },
        }
    }
}

/// Steps an anisotropic run, calling `visit(step, state, parity_drift)` on
/// the initial state and after every step. The first error ends the run.
pub(crate) fn drive_aniso(
    solver: &AnisoSolver,
    init: AnisoState,
    forcing: &dyn Forcing,
    dt: f64,
    steps: usize,
    mut visit: impl FnMut(usize, &AnisoState, f64) -> Result<()>,
) -> (AnisoState, Outcome) {
    let mut s = init;
    let mut cache = None;
    let mut out = Outcome {
        steps: 0,
        t: s.t,
        error: None,
    };
    if let Err(e) = visit(0, &s, s.parity_defect()) {
        out.error = Some(e.to_string());
        return (s, out);
    }
    for k in 1..=steps {
        let next = solver
            .step_cached(&s, forcing, dt, &mut cache)
            .and_then(|n| visit(k, &n, solver.last_parity_drift()).map(|_| n));
        match next {
            Ok(n) => {
                s = n;
                out.steps = k;
                out.t = s.t;
            }
            Err(e) => {
                out.error = Some(e.to_string());
                break;
            }
        }
    }
    (s, out)
}

/// Hydrostatic counterpart of [`drive_aniso`].
pub(crate) fn drive_hydro(
    solver: &HydroSolver,
    init: HydroState,
    forcing: &dyn Forcing,
    dt: f64,
    steps: usize,
    mut visit: impl FnMut(usize, &HydroState, f64) -> Result<()>,
) -> (HydroState, Outcome) {
    let mut s = init;
    let mut cache = None;
    let mut out = Outcome {
        steps: 0,
        t: s.t,
        error: None,
    };
    let drift0 = [&s.u1, &s.u2, &s.c]
        .iter()
        .map(|f| f.parity_residual().unwrap_or(f64::INFINITY) / f.l2_norm().max(1.0))
        .fold(0.0, f64::max);
    if let Err(e) = visit(0, &s, drift0) {
        out.error = Some(e.to_string());
        return (s, out);
    }
    for k in 1..=steps {
        let next = solver
            .step_cached(&s, forcing, dt, &mut cache)
            .and_then(|n| visit(k, &n, solver.last_parity_drift()).map(|_| n));
        match next {
            Ok(n) => {
                s = n;
                out.steps = k;
                out.t = s.t;
            }
            Err(e) => {
                out.error = Some(e.to_string());
                break;
            }
        }
    }
    (s, out)
}

/// Largest pointwise Coriolis work relative to `2f max |u|^2` (weighted).
pub fn coriolis_ratio(s: &AnisoState, params: &PhysicalParams) -> f64 {
    let w = coriolis_work(&s.u1, &s.u2, &s.u3, params).max_abs();
    let e2 = params.eps * params.eps;
    let scale = (0..s.grid().len())
        .map(|i| {
            let (a, b, c) = (s.u1.values()[i], s.u2.values()[i], s.u3.values()[i]);
            a * a + b * b + e2 * c * c
        })
        .fold(0.0, f64::max)
        * 2.0
        * params.f;
    if scale == 0.0 {
        0.0
    } else {
        w / scale
    }
}

fn source_l1(s: &Field) -> f64 {
    s.values().iter().map(|v| v.abs()).sum::<f64>() * s.grid().cell_volume()
}

/// Streaming monitors of an anisotropic run.
pub(crate) struct AnisoMonitor {
    params: PhysicalParams,
    source: Field,
    source_mass: f64,
    budget_scale: f64,
    sample_every: usize,
    dt: f64,
    cfl_safety: f64,
    pub energy: EnergyMonitor,
    pub apriori: AprioriMonitor,
    pub budget: TracerBudget,
    pub max_divergence: f64,
    pub max_drift: f64,
    pub max_coriolis: f64,
    pub max_courant: f64,
    pub rows: Vec<SeriesRow>,
}

impl AnisoMonitor {
    pub fn new(
        grid: SpectralGrid,
        params: PhysicalParams,
        source: Field,
        step: &StepControl,
        sample_every: usize,
    ) -> Self {
        let dt = step.dt;
        let source_mass = source.integral();
        let budget_scale = 1.0 + dt * sample_every as f64 * source_l1(&source);
        Self {
            params,
            source,
            source_mass,
            budget_scale,
            sample_every,
            dt,
            cfl_safety: step.cfl_safety,
            energy: EnergyMonitor::new(grid, params),
            apriori: AprioriMonitor::new(params.eps),
            budget: TracerBudget::new(),
            max_divergence: 0.0,
            max_drift: 0.0,
            max_coriolis: 0.0,
            max_courant: 0.0,
            rows: Vec::new(),
        }
    }

    pub fn is_sample(&self, step: usize) -> bool {
        step.is_multiple_of(self.sample_every)
    }

    pub fn visit(&mut self, step: usize, s: &AnisoState, drift: f64) -> Result<()> {
        let div = s.divergence_ratio();
        let cor = coriolis_ratio(s, &self.params);
        let cfl = courant([&s.u1, &s.u2, &s.u3], self.dt);
        self.max_divergence = self.max_divergence.max(div);
        self.max_drift = self.max_drift.max(drift);
        self.max_coriolis = self.max_coriolis.max(cor);
        self.max_courant = self.max_courant.max(cfl);
        if !self.is_sample(step) {
            return Ok(());
        }
        self.energy.push(s, Some(&self.source))?;
        self.apriori.push(s);
        let mass = s.c.integral();
        self.budget.push(s.t, mass, self.source_mass);
        let b = self.energy.budget();
        let i = b.len() - 1;
        let eps = self.params.eps;
        let t = s.t;
        for (q, v) in [
            ("energy", b.energy(i)),
            ("kinetic_h", b.kinetic_h[i]),
            ("kinetic_3_weighted", b.kinetic_3_weighted[i]),
            ("concentration_l2", b.concentration_l2[i]),
            ("dissipation", b.dissipation(i)),
            ("source_work", b.source_work[i]),
            ("coupling_work", b.coupling_work[i]),
            ("energy_slack", b.slack[i]),
            ("divergence", div),
            ("parity_drift", drift),
            ("coriolis_work", cor),
            ("courant", cfl),
            ("tracer_mass", mass),
        ] {
            self.rows.push(SeriesRow::new(eps, t, q, v));
        }
        Ok(())
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        let e = self.energy.report();
        vec![
            Verdict::at_most("energy_slack", e.max_relative_slack, ENERGY_TOL),
            Verdict::at_most("divergence", self.max_divergence, STRUCTURE_TOL),
            Verdict::at_most("parity", self.max_drift, STRUCTURE_TOL),
            Verdict::at_most("coriolis_work", self.max_coriolis, CORIOLIS_TOL),
            Verdict::at_most(
                "tracer_budget",
                self.budget.max_residual / self.budget_scale,
                BUDGET_TOL,
            ),
            Verdict::at_most("courant", self.max_courant, self.cfl_safety),
        ]
    }
}

/// Streaming monitors of a hydrostatic run.
pub(crate) struct HydroMonitor {
    eps: f64,
    source_mass: f64,
    budget_scale: f64,
    sample_every: usize,
    pub budget: TracerBudget,
    pub max_principle: MaxPrincipleMonitor,
    pub max_barotropic: f64,
    pub max_drift: f64,
    pub max_coriolis: f64,
    pub rows: Vec<SeriesRow>,
    gamma: f64,
}

impl HydroMonitor {
    /// `eps` only labels the rows (the hydrostatic limit has none).
    pub fn new(params: &PhysicalParams, c0: &Field, source: &Field, dt: f64, sample_every: usize, eps: f64) -> Self {
        Self {
            eps,
            source_mass: source.integral(),
            budget_scale: 1.0 + dt * sample_every as f64 * source_l1(source),
            sample_every,
            budget: TracerBudget::new(),
            max_principle: MaxPrincipleMonitor::new(physical_concentration(c0).max_abs(), source.max_abs()),
            max_barotropic: 0.0,
            max_drift: 0.0,
            max_coriolis: 0.0,
            rows: Vec::new(),
            gamma: params.coriolis().gamma,
        }
    }

    pub fn is_sample(&self, step: usize) -> bool {
        step.is_multiple_of(self.sample_every)
    }

    pub fn visit(&mut self, step: usize, s: &HydroState, drift: f64) -> Result<()> {
        let baro = s.barotropic_ratio();
        let g = self.gamma;
        let (w, scale) = (0..s.grid().len()).fold((0.0_f64, 0.0_f64), |(w, m), i| {
            let (a, b) = (s.u1.values()[i], s.u2.values()[i]);
            ((g * b * a - g * a * b).abs().max(w), m.max(a * a + b * b))
        });
        let cor = if scale == 0.0 {
            0.0
        } else {
            w / (g.abs().max(f64::MIN_POSITIVE) * scale)
        };
        self.max_barotropic = self.max_barotropic.max(baro);
        self.max_drift = self.max_drift.max(drift);
        self.max_coriolis = self.max_coriolis.max(cor);
        if !self.is_sample(step) {
            return Ok(());
        }
        let mass = s.c.integral();
        self.budget.push(s.t, mass, self.source_mass);
        self.max_principle.push(s.t, &s.c);
        let mp = self.max_principle.report();
        let energy = 0.5 * (s.u1.l2_norm().powi(2) + s.u2.l2_norm().powi(2) + s.c.l2_norm().powi(2));
        let t = s.t;
        for (q, v) in [
            ("energy", energy),
            ("sup_c", *mp.sup_c.last().expect("just pushed")),
            ("max_principle_bound", *mp.bound.last().expect("just pushed")),
            ("barotropic", baro),
            ("parity_drift", drift),
            ("coriolis_work", cor),
            ("tracer_mass", mass),
        ] {
            self.rows.push(SeriesRow::new(self.eps, t, q, v));
        }
        Ok(())
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        let mp = self.max_principle.report();
        vec![
            Verdict::at_most("max_principle", mp.worst_margin.max(0.0), 0.0),
            Verdict::at_most("barotropic", self.max_barotropic, STRUCTURE_TOL),
            Verdict::at_most("parity", self.max_drift, STRUCTURE_TOL),
            Verdict::at_most("coriolis_work", self.max_coriolis, CORIOLIS_TOL),
            Verdict::at_most(
                "tracer_budget",
                self.budget.max_residual / self.budget_scale,
                BUDGET_TOL,
            ),
        ]
    }
}

fn snapshot(dir: &Path, list: &mut Vec<PathBuf>, step: usize, t: f64, fields: &[(&str, &Field)]) -> Result<()> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    for (name, f) in fields {
        let rel = PathBuf::from("snapshots").join(format!("{name}_{step:06}.bin"));
        save_snapshot(&dir.join(&rel), f, name, t)?;
        list.push(rel);
    }
    Ok(())
}

/// Executes one run as configured, writing `record.json`, `series.csv` and
/// `timing.json` (plus snapshots) to the output directory. Invalid configs,
/// including a step above the coupling cap, are rejected before stepping; a
/// blow-up yields a failed record carrying the last stable time.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let dir = cfg.output_path();
    prepare_dir(&dir)?;
    let record = execute(cfg, Some(&dir))?;
    write_json(&dir.join("record.json"), &record)?;
    write_csv(&dir.join("series.csv"), &cfg.experiment_id, &record.series)?;
    write_json(
        &dir.join("timing.json"),
        &serde_json::json!({ "experiment_id": cfg.experiment_id, "wall_time_s": record.wall_time }),
    )?;
    std::fs::write(dir.join("config.txt"), cfg.to_text())?;
    Ok(record)
}

/// Runs without touching the file system.
pub fn run_in_memory(cfg: &RunConfig) -> Result<RunRecord> {
    cfg.validate()?;
    execute(cfg, None)
}

fn execute(cfg: &RunConfig, dir: Option<&Path>) -> Result<RunRecord> {
    let start = Instant::now();
    let eps = cfg.params.eps;
    let prep = prepare(cfg, eps)?;
    let dt = cfg.step.dt;
    let steps = cfg.step.steps();
    let every = if dir.is_some() { cfg.snapshot_every } else { 0 };
    let mut snaps = Vec::new();
    let mut io_error: Option<Error> = None;

    let (outcome, verdicts, series) = match cfg.solver {
        SolverKind::Aniso => {
            let solver = AnisoSolver::new(prep.grid, cfg.params)?;
            let forcing = SteadySource(prep.sources.s_eps.clone());
            let mut mon = AnisoMonitor::new(
                prep.grid,
                cfg.params,
                prep.sources.s_eps.clone(),
                &cfg.step,
                cfg.sample_every,
            );
            let (_, out) = drive_aniso(&solver, prep.init, &forcing, dt, steps, |k, s, d| {
                mon.visit(k, s, d)?;
                if every > 0 && k % every == 0 && io_error.is_none() {
                    let fields = [("u1", &s.u1), ("u2", &s.u2), ("u3", &s.u3), ("c", &s.c), ("p", &s.p)];
                    if let Err(e) = snapshot(dir.expect("snapshots need a directory"), &mut snaps, k, s.t, &fields) {
                        io_error = Some(e);
                    }
                }
                Ok(())
            });
            (out, mon.verdicts(), mon.rows)
        }
        SolverKind::Hydro => {
            let solver = HydroSolver::new(prep.grid, cfg.params, HydroOptions { mu: cfg.mu })?;
            let forcing = SteadySource(prep.sources.s_limit.clone());
            let init = hydro_initial(&prep.init);
            let mut mon = HydroMonitor::new(&cfg.params, &init.c, &prep.sources.s_limit, dt, cfg.sample_every, 0.0);
            let (_, out) = drive_hydro(&solver, init, &forcing, dt, steps, |k, s, d| {
                mon.visit(k, s, d)?;
                if every > 0 && k % every == 0 && io_error.is_none() {
                    let u3 = s.u3()?;
                    let fields = [("u1", &s.u1), ("u2", &s.u2), ("u3", &u3), ("c", &s.c)];
                    if let Err(e) = snapshot(dir.expect("snapshots need a directory"), &mut snaps, k, s.t, &fields) {
                        io_error = Some(e);
                    }
                }
                Ok(())
            });
            (out, mon.verdicts(), mon.rows)
        }
    };
    if let Some(e) = io_error {
        return Err(e);
    }
    let record = RunRecord {
        experiment_id: cfg.experiment_id.clone(),
        config_hash: cfg.hash(),
        solver: cfg.solver,
        eps: if cfg.solver == SolverKind::Aniso { eps } else { 0.0 },
        mu: cfg.mu,
        grid: cfg.n,
        dt,
        steps: outcome.steps,
        t_final: outcome.t,
        status: outcome.status(),
        verdicts,
        series,
        snapshots: snaps,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(record)
}
