//! Flat spectral kernels used by the solvers' hot loops.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fields::{fft, SpectralGrid, Wavenumbers};

pub(crate) type Coeffs = Vec<Complex64>;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) struct SpectralOps {
    pub grid: SpectralGrid,
    /// Wavenumbers with Nyquist modes zeroed (derivative convention).
    pub k: Vec<[f64; 3]>,
    /// True when the mode survives 2/3 truncation.
    pub mask: Vec<bool>,
    /// True for modes with zero vertical wavenumber index.
    pub barotropic: Vec<bool>,
}

impl SpectralOps {
    pub fn new(grid: SpectralGrid) -> Self {
        let wn = Wavenumbers::new(&grid);
        let mut k = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        let mut barotropic = Vec::with_capacity(grid.len());
        for i1 in 0..grid.n1 {
            for i2 in 0..grid.n2 {
                for i3 in 0..grid.n3 {
                    k.push([wn.k_odd(0, i1), wn.k_odd(1, i2), wn.k_odd(2, i3)]);
                    mask.push(wn.resolved[0][i1] && wn.resolved[1][i2] && wn.resolved[2][i3]);
                    barotropic.push(i3 == 0);
                }
            }
        }
        Self {
            grid,
            k,
            mask,
            barotropic,
        }
    }

    pub fn forward(&self, values: &[f64]) -> Coeffs {
        fft::real_to_coeffs(values, self.grid.dims())
    }

    pub fn forward_dealiased(&self, values: &[f64]) -> Coeffs {
        let mut c = self.forward(values);
        self.dealias(&mut c);
        c
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        fft::coeffs_to_real(coeffs, self.grid.dims())
    }

    pub fn dealias(&self, c: &mut [Complex64]) {
        c.par_iter_mut().zip(self.mask.par_iter()).for_each(|(c, &m)| {
            if !m {
                *c = Complex64::new(0.0, 0.0);
            }
        });
    }

    pub fn deriv(&self, c: &[Complex64], axis: usize) -> Coeffs {
        c.par_iter()
            .zip(self.k.par_iter())
            .map(|(c, k)| c * I * k[axis])
            .collect()
    }

    /// Real-space gradient of a spectral field.
    pub fn grad_real(&self, c: &[Complex64]) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|ax| self.inverse(&self.deriv(c, ax)))
    }

    /// Part of a spectral field with the given z-reflection sign
    /// (`1.0` even, `-1.0` odd).
    pub fn parity_part(&self, c: &[Complex64], sign: f64) -> Coeffs {
        let n3 = self.grid.n3;
        let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
        out.par_chunks_mut(n3).enumerate().for_each(|(line, col)| {
            let base = line * n3;
            for i3 in 0..n3 {
                let m = (n3 - i3) % n3;
                col[i3] = 0.5 * (c[base + i3] + sign * c[base + m]);
            }
        });
        out
    }
}

/// Exponential time-differencing weights for one step, per mode:
/// `e = exp(-z)`, `phi1 = (1 - e) / z`, `phi2 = (e - 1 + z) / z^2` with
/// `z = dt * (w1 k1^2 + w2 k2^2 + w3 k3^2)`.
pub(crate) struct EtdWeights {
    pub e: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

impl SpectralOps {
    pub fn etd(&self, w: [f64; 3], dt: f64) -> EtdWeights {
        let wn = Wavenumbers::new(&self.grid);
        let n = self.grid.len();
        let mut out = EtdWeights {
            e: vec![0.0; n],
            phi1: vec![0.0; n],
            phi2: vec![0.0; n],
        };
        wn.for_each_mode(&self.grid, |idx, k| {
            let z = dt * (w[0] * k[0] * k[0] + w[1] * k[1] * k[1] + w[2] * k[2] * k[2]);
            let (e, p1, p2) = etd_scalars(z);
            out.e[idx] = e;
            out.phi1[idx] = p1;
            out.phi2[idx] = p2;
        });
        out
    }
}

pub(crate) fn etd_scalars(z: f64) -> (f64, f64, f64) {
    let e = (-z).exp();
    if z < 1e-3 {
        // Taylor series; the closed forms cancel catastrophically here.
        let p1 = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
        let p2 = 0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0;
        (e, p1, p2)
    } else {
        let em1 = -(-z).exp_m1();
        (e, em1 / z, (z - em1) / (z * z))
    }
}

pub(crate) fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += a * x);
}

pub(crate) fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Decay exponent of the random initial spectrum: mode amplitudes scale as
/// `(1 + |m|^2)^-SPECTRAL_DECAY`.
pub(crate) const SPECTRAL_DECAY: f64 = 5.0;

/// Random coefficients on the modes with every `|m_i| <= bandlimit`,
/// weighted by `(1 + |m|^2)^-SPECTRAL_DECAY`.
pub(crate) fn random_coeffs(grid: &SpectralGrid, rng: &mut ChaCha8Rng, bandlimit: usize) -> Coeffs {
    let b = bandlimit as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, c) in out.iter_mut().enumerate() {
        let (i1, i2, i3) = grid.unravel(idx);
        let m = [
            grid.signed_mode(0, i1),
            grid.signed_mode(1, i2),
            grid.signed_mode(2, i3),
        ];
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if m.iter().all(|m| m.abs() <= b) {
            let m2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
            *c = Complex64::new(re, im) / (1.0 + m2).powf(SPECTRAL_DECAY);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::etd_scalars;

    #[test]
    fn etd_weights_are_continuous_across_the_series_switch() {
        for z in [0.0, 1e-6, 9.99e-4, 1.001e-3, 0.5, 30.0] {
            let (e, p1, p2) = etd_scalars(z);
            assert!((e - (-z as f64).exp()).abs() < 1e-15);
            if z > 0.0 {
                // quadrature oracle: phi1 = int_0^1 e^{-z s} ds, phi2 = int_0^1 s e^{-z (1-s)} ds
                let m = 20000;
                let h = 1.0 / m as f64;
                let (mut q1, mut q2) = (0.0, 0.0);
                for j in 0..m {
                    let s = (j as f64 + 0.5) * h;
                    q1 += (-z * s).exp() * h;
                    q2 += (1.0 - s) * (-z * s).exp() * h;
                }
                assert!((p1 - q1).abs() < 1e-8, "{z}");
                assert!((p2 - q2).abs() < 1e-8, "{z}");
            } else {
                assert_eq!((p1, p2), (1.0, 0.5));
            }
        }
    }
}
