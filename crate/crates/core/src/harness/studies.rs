//! Dedicated experiments: energy-slack order in dt, the mu -> 0 limit of
//! the regularized hydrostatic system, and the maximum principle with its
//! negative control.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::run::{drive_aniso, drive_hydro, hydro_initial, prepare, AnisoMonitor, ENERGY_TOL};
use crate::analysis::{
    decreasing_with, halving_ratios, physical_concentration, EnergyReport, MaxPrincipleMonitor, MaxPrincipleReport,
};
use crate::aniso::{AnisoSolver, StepControl};
use crate::error::{config, Result};
use crate::fields::Field;
use crate::forcing::SteadySource;
use crate::hydro::{HydroOptions, HydroSolver};

/// Smallest admissible slack reduction per dt halving.
pub const ENERGY_HALVING_MIN: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyStudy {
    pub eps: f64,
    pub dts: Vec<f64>,
    /// Largest `(LHS - RHS) / scale` per level; positive values violate the
    /// inequality.
    pub max_relative_slack: Vec<f64>,
    pub max_abs_relative_slack: Vec<f64>,
    pub ratios: Vec<f64>,
    pub pass: bool,
}

fn energy_report(cfg: &RunConfig, eps: f64, dt: f64) -> Result<EnergyReport> {
    let params = cfg.params.with_eps(eps);
    let prep = prepare(cfg, eps)?;
    let solver = AnisoSolver::new(prep.grid, params)?;
    let step = StepControl { dt, ..cfg.step };
    let steps = step.steps();
    let mut mon = AnisoMonitor::new(prep.grid, params, prep.sources.s_eps.clone(), &step, 1);
    let forcing = SteadySource(prep.sources.s_eps);
    let (_, out) = drive_aniso(&solver, prep.init, &forcing, dt, steps, |k, s, d| mon.visit(k, s, d));
    if let Some(e) = out.error {
        return config(format!("energy run at eps = {eps}, dt = {dt} failed: {e}"));
    }
    Ok(mon.energy.report())
}

/// Energy-inequality slack at `dt, dt/2, ...` (`levels` values). `base`
/// may supply an already computed report at `dt` sampled every step.
pub fn energy_study(cfg: &RunConfig, eps: f64, levels: usize, base: Option<&EnergyReport>) -> Result<EnergyStudy> {
    if levels < 2 {
        return config("an energy study needs at least two time steps");
    }
    let p = cfg.params.with_eps(eps);
    cfg.step.validate(&p)?;
    let dts: Vec<f64> = (0..levels).map(|i| cfg.step.dt / f64::powi(2.0, i as i32)).collect();
    let reports = dts
        .par_iter()
        .enumerate()
        .map(|(i, &dt)| match (i, base) {
            (0, Some(b)) => Ok(b.clone()),
            _ => energy_report(cfg, eps, dt),
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = halving_ratios(&reports);
    let first = reports[0].max_relative_slack;
    Ok(EnergyStudy {
        eps,
        pass: first <= ENERGY_TOL && ratios.iter().all(|&r| r >= ENERGY_HALVING_MIN),
        max_relative_slack: reports.iter().map(|r| r.max_relative_slack).collect(),
        max_abs_relative_slack: reports.iter().map(|r| r.max_abs_relative_slack).collect(),
        dts,
        ratios,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuStudy {
    pub mu: Vec<f64>,
    /// `sup_t ||c^mu - c^0||_L2` per mu.
    pub distance: Vec<f64>,
    pub decreasing: bool,
}

fn hydro_tracer_samples(cfg: &RunConfig, mu: f64) -> Result<Vec<Field>> {
    let prep = prepare(cfg, cfg.params.eps)?;
    let solver = HydroSolver::new(prep.grid, cfg.params, HydroOptions { mu })?;
    let forcing = SteadySource(prep.sources.s_limit);
    let mut out = Vec::new();
    let every = cfg.sample_every;
    let (_, o) = drive_hydro(
        &solver,
        hydro_initial(&prep.init),
        &forcing,
        cfg.step.dt,
        cfg.step.steps(),
        |k, s, _| {
            if k % every == 0 {
                out.push(s.c.clone());
            }
            Ok(())
        },
    );
    if let Some(e) = o.error {
        return config(format!("hydrostatic run at mu = {mu} failed: {e}"));
    }
    Ok(out)
}

/// Distance of the regularized hydrostatic tracer from the unregularized
/// one for each mu, from the configured data.
pub fn mu_study(cfg: &RunConfig, mu_list: &[f64]) -> Result<MuStudy> {
    if mu_list.is_empty() || mu_list.iter().any(|&m| !(m > 0.0)) {
        return config("mu values must be positive");
    }
    let reference = hydro_tracer_samples(cfg, 0.0)?;
    let distance = mu_list
        .par_iter()
        .map(|&mu| {
            let c = hydro_tracer_samples(cfg, mu)?;
            Ok(c.iter()
                .zip(&reference)
                .map(|(a, b)| a.sub(b).l2_norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MuStudy {
        mu: mu_list.to_vec(),
        decreasing: decreasing_with(mu_list, &distance),
        distance,
    })
}

/// Source gain of the negative-control run.
pub const CONTROL_GAIN: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleStudy {
    /// The bound `1 + ||c0|| + ||s|| t` over the configured run.
    pub report: MaxPrincipleReport,
    /// The same bound on a run from rest whose source is `CONTROL_GAIN`
    /// times stronger.
    pub strong: MaxPrincipleReport,
    /// The strong run against the bound without its `||s|| t` term; this
    /// one is expected to fail.
    pub control: MaxPrincipleReport,
}

impl MaxPrincipleStudy {
    /// Both bounds hold and the negative control fails.
    pub fn pass(&self) -> bool {
        self.report.holds() && self.strong.holds() && !self.control.holds()
    }
}

fn envelope_run(cfg: &RunConfig) -> Result<(MaxPrincipleReport, MaxPrincipleReport)> {
    let prep = prepare(cfg, cfg.params.eps)?;
    let solver = HydroSolver::new(prep.grid, cfg.params, HydroOptions { mu: cfg.mu })?;
    let s = prep.sources.s_limit;
    let init = hydro_initial(&prep.init);
    let c0 = physical_concentration(&init.c).max_abs();
    let mut standard = MaxPrincipleMonitor::new(c0, s.max_abs());
    let mut flat = MaxPrincipleMonitor::with_envelope(1.0 + c0, 0.0);
    let every = cfg.sample_every;
    let forcing = SteadySource(s);
    let (_, out) = drive_hydro(&solver, init, &forcing, cfg.step.dt, cfg.step.steps(), |k, st, _| {
        if k % every == 0 {
            standard.push(st.t, &st.c);
            flat.push(st.t, &st.c);
        }
        Ok(())
    });
    if let Some(e) = out.error {
        return config(format!("maximum-principle run failed: {e}"));
    }
    Ok((standard.report().clone(), flat.report().clone()))
}

/// Hydrostatic run checked against the maximum-principle envelope, plus a
/// negative control: a strongly forced run from rest must break the envelope once its
/// source term is removed.
pub fn max_principle_study(cfg: &RunConfig) -> Result<MaxPrincipleStudy> {
    cfg.validate()?;
    let (report, _) = envelope_run(cfg)?;
    let mut strong_cfg = cfg.clone();
    strong_cfg.source.amplitude *= CONTROL_GAIN;
    strong_cfg.amplitude = 0.0;
    let (strong, control) = envelope_run(&strong_cfg)?;
    Ok(MaxPrincipleStudy {
        report,
        strong,
        control,
    })
}
