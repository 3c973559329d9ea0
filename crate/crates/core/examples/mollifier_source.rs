//! The mollifier and the anisotropic / hydrostatic source pair.

use hydrolimit::fields::SpectralGrid;
use hydrolimit::model::{build_source, mollified_delta, mollifier_mass, SourceSpec};

fn main() -> hydrolimit::Result<()> {
    println!("mollifier mass {:.9}", mollifier_mass());
    let fine = SpectralGrid::new(200, 200, 100, 0.25)?;
    for eps in [0.2, 0.1] {
        let m = mollified_delta(&fine, eps, [0.5, 0.5, 0.0])?.integral();
        println!("eps {eps}: sampled mass {m:.9}");
    }

    let grid = SpectralGrid::cubic(32, 1.0)?;
    for eps in [0.2, 0.1, 0.05, 0.025] {
        let pair = build_source(&SourceSpec::convolved(eps, [0.5, 0.5, -0.5], None), &grid)?;
        let gap = pair.s_eps.sub(&pair.s_limit).l2_norm();
        println!("eps {eps:<5}  ||s_eps - s||_L2 = {gap:.3e}");
    }
    Ok(())
}
