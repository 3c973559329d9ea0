//! Steps the anisotropic system directly and watches its structure.

use hydrolimit::aniso::{init_random_state, AnisoSolver};
use hydrolimit::fields::SpectralGrid;
use hydrolimit::forcing::SteadySource;
use hydrolimit::model::{build_source, PhysicalParams, SourceSpec};

fn main() -> hydrolimit::Result<()> {
    let grid = SpectralGrid::cubic(16, 1.0)?;
    let params = PhysicalParams::default().with_eps(0.1);
    let solver = AnisoSolver::new(grid, params)?;
    let source = build_source(&SourceSpec::convolved(params.eps, [0.5, 0.5, -0.5], None), &grid)?;
    let forcing = SteadySource(source.s_eps);

    let mut s = init_random_state(&grid, 7, 1.0, 2)?;
    let dt = 0.005;
    let mut cache = None;
    for k in 1..=40 {
        s = solver.step_cached(&s, &forcing, dt, &mut cache)?;
        if k % 10 == 0 {
            println!(
                "t {:.3}  |u1|_2 {:.5}  |c|_2 {:.5}  div {:.1e}  parity drift {:.1e}",
                s.t,
                s.u1.l2_norm(),
                s.c.l2_norm(),
                s.divergence_ratio(),
                solver.last_parity_drift()
            );
        }
    }
    Ok(())
}
