//! Ratio statistics of the two trilinear inequalities over random fields.

use hydrolimit::analysis::ladyzhenskaya_sample;
use hydrolimit::fields::SpectralGrid;

fn main() -> hydrolimit::Result<()> {
    let grid = SpectralGrid::cubic(16, 1.0)?;
    let stats = ladyzhenskaya_sample(&grid, 1, 200, 4)?;
    for (name, r) in [("f-h variant", &stats.fh), ("g-h variant", &stats.gh)] {
        println!(
            "{name}: min {:.3} median {:.3} max {:.3}  max/median {:.2}",
            r.min, r.median, r.max, r.max_over_median
        );
    }
    Ok(())
}
