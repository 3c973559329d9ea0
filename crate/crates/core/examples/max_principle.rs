//! Sup-norm envelope of the hydrostatic concentration, and a control run
//! that breaks the envelope once its source term is dropped.

use hydrolimit::harness::{max_principle_study, RunConfig, SolverKind};

fn main() -> hydrolimit::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.solver = SolverKind::Hydro;
    cfg.n = [16, 16, 16];
    let study = max_principle_study(&cfg)?;
    let r = &study.report;
    for i in (0..r.t.len()).step_by(16) {
        println!("t {:.3}  sup|c| {:.4}  bound {:.4}", r.t[i], r.sup_c[i], r.bound[i]);
    }
    println!("control first violation at {:?}", study.control.first_violation);
    println!("pass {}", study.pass());
    Ok(())
}
