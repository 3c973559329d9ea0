//! Hydrostatic limit through the harness: one run with its verdicts.

use hydrolimit::harness::{cmd_run, RunConfig, SolverKind};

fn main() -> hydrolimit::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.experiment_id = "example-hydro".into();
    cfg.solver = SolverKind::Hydro;
    cfg.n = [16, 16, 16];
    cfg.step.t_end = 0.25;
    let record = cmd_run(&cfg)?;
    for v in &record.verdicts {
        println!(
            "{:<14} {:.3e} (limit {:.0e}) {}",
            v.name,
            v.value,
            v.limit,
            if v.pass { "ok" } else { "FAIL" }
        );
    }
    println!("written to {}", cfg.output_path().display());
    Ok(())
}
