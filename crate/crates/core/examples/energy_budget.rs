//! Energy-inequality slack and its decay under dt halving, on the default
//! 32^3 grid (about half a minute in release). Coarser grids put the
//! halving ratio just under 4.

use hydrolimit::harness::{energy_study, RunConfig};

fn main() -> hydrolimit::Result<()> {
    let cfg = RunConfig::default();
    let study = energy_study(&cfg, 0.1, 3, None)?;
    for (dt, slack) in study.dts.iter().zip(&study.max_abs_relative_slack) {
        println!("dt {dt:.6}  max |slack| / scale {slack:.3e}");
    }
    println!("halving ratios {:?}  pass {}", study.ratios, study.pass);
    Ok(())
}
