//! Horizontal regularization mu -> 0 of the hydrostatic tracer.

use hydrolimit::harness::{mu_study, RunConfig};

fn main() -> hydrolimit::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.n = [16, 16, 16];
    let study = mu_study(&cfg, &[0.2, 0.1, 0.05, 0.025])?;
    for (mu, d) in study.mu.iter().zip(&study.distance) {
        println!("mu {mu:<6} sup_t ||c_mu - c_0||_L2 = {d:.4e}");
    }
    println!("strictly decreasing: {}", study.decreasing);
    Ok(())
}
