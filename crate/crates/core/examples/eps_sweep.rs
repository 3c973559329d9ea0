//! The eps -> 0 sweep on a coarse grid, with rate fits per norm.
//!
//! `cargo run --release --example eps_sweep` takes a few seconds; the
//! default 32^3 sweep is `hydrolimit sweep`.

use hydrolimit::harness::{cmd_sweep, RunConfig};

fn main() -> hydrolimit::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.experiment_id = "example-sweep".into();
    cfg.n = [16, 16, 16];
    let report = cmd_sweep(&cfg, &[0.2, 0.1, 0.05, 0.025])?;
    for d in &report.diffs {
        println!(
            "eps {:<6} sup ||U_h||_L2 {:.4e}  sup ||C||_H1 {:.4e}",
            d.eps, d.sup_uh_l2, d.sup_c_h1
        );
    }
    for (key, fit) in &report.fits {
        println!("{key:<16} slope {:6.3}  r2 {:.4}", fit.slope, fit.r_squared);
    }
    Ok(())
}
