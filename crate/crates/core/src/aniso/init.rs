use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AnisoState;
use crate::error::{config, Result};
use crate::fields::{Field, Parity, SpectralGrid};
use crate::hydro::{diagnose_u3_spec, project_barotropic_spec};
use crate::ops::{random_coeffs, Coeffs, SpectralOps};

/// Real, parity-symmetrized field from random coefficients, back in
/// spectral form.
fn symmetric(ops: &SpectralOps, c: &Coeffs, parity: Parity) -> Coeffs {
    let f = Field::from_values(ops.grid, ops.inverse(c), parity).expect("grid-sized");
    ops.forward(f.symmetrize().values())
}

/// Random band-limited initial state: even horizontal velocity with zero
/// mean, diagnostic (exactly divergence-free) vertical velocity, odd tracer,
/// zero pressure. `amplitude` is the rms of both `u_h` and `c`.
///
/// Mode amplitudes decay like `(1 + |m|^2)^-5` inside the band, so the data
/// is smooth well beyond H^3 and most of its energy sits in the lowest modes.
pub fn init_random_state(grid: &SpectralGrid, seed: u64, amplitude: f64, bandlimit: usize) -> Result<AnisoState> {
    let nmin = grid.n1.min(grid.n2).min(grid.n3);
    if 3 * bandlimit >= nmin {
        return config(format!(
            "bandlimit {bandlimit} must be below n/3 = {}",
            nmin as f64 / 3.0
        ));
    }
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return config(format!("amplitude must be nonnegative, got {amplitude}"));
    }
    if amplitude == 0.0 {
        return Ok(AnisoState::zeros(grid));
    }
    let ops = SpectralOps::new(*grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u1 = symmetric(&ops, &random_coeffs(grid, &mut rng, bandlimit), Parity::Even);
    let mut u2 = symmetric(&ops, &random_coeffs(grid, &mut rng, bandlimit), Parity::Even);
    let mut c = symmetric(&ops, &random_coeffs(grid, &mut rng, bandlimit), Parity::Odd);
    for x in [&mut u1, &mut u2, &mut c] {
        x[0] = Complex64::new(0.0, 0.0);
    }
    project_barotropic_spec(&ops, &mut u1, &mut u2);

    let rms = |xs: &[&Coeffs]| -> f64 { (xs.iter().flat_map(|x| x.iter()).map(|c| c.norm_sqr()).sum::<f64>()).sqrt() };
    let su = amplitude / rms(&[&u1, &u2]);
    let sc = amplitude / rms(&[&c]);
    for x in u1.iter_mut().chain(u2.iter_mut()) {
        *x *= su;
    }
    for x in c.iter_mut() {
        *x *= sc;
    }
    let u3 = diagnose_u3_spec(&ops, &u1, &u2)?;
    let mk = |c: &Coeffs, p: Parity| {
        Field::from_values(*grid, ops.inverse(c), p)
            .expect("grid-sized")
            .symmetrize()
    };
    Ok(AnisoState {
        u1: mk(&u1, Parity::Even),
        u2: mk(&u2, Parity::Even),
        u3: mk(&u3, Parity::Odd),
        c: mk(&c, Parity::Odd),
        p: Field::zeros(*grid, Parity::Even),
        t: 0.0,
    })
}
