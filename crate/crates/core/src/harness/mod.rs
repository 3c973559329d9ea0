//! Experiment driver: configuration, single runs, eps sweeps, the check
//! suites and report rendering. The `hydrolimit` binary is a thin layer
//! over this module.

mod check;
mod config;
mod output;
mod report;
mod run;
mod studies;
mod sweep;

pub use check::{check_in_memory, cmd_check, CheckReport, SUITES};
pub use config::{RunConfig, SolverKind, SourceConfig, CONFIG_KEYS, OUTPUT_ENV};
pub use output::{csv_text, SeriesRow, CSV_HEADER};
pub use report::cmd_report;
pub use run::{
    cmd_run, coriolis_ratio, run_in_memory, RunRecord, RunStatus, Verdict, BUDGET_TOL, CORIOLIS_TOL, ENERGY_TOL,
    STRUCTURE_TOL,
};
pub use studies::{
    energy_study, max_principle_study, mu_study, EnergyStudy, MaxPrincipleStudy, MuStudy, CONTROL_GAIN,
    ENERGY_HALVING_MIN,
};
pub use sweep::{cmd_sweep, EnergySummary, SweepReport};
