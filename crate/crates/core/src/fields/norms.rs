use serde::{Deserialize, Serialize};

use super::field::{Field, Spectrum};

/// Sobolev and directional norms of one field.
///
/// `H^s` norms use the Fourier weight `(1 + |k|^2)^s`, so that
/// `h1^2 = l2^2 + sum_i ||d_i f||^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub linf: f64,
    /// `||d_i f||_2` for i = 1, 2, 3.
    pub d: [f64; 3],
}

pub fn norms(f: &Field) -> NormReport {
    let mut r = spectral_norms(&f.spectrum());
    r.linf = f.max_abs();
    r
}

/// All norms except `linf`, which needs real-space values and is left at 0.
pub fn spectral_norms(s: &Spectrum) -> NormReport {
    let mut acc = [0.0_f64; 4];
    let mut dir = [0.0_f64; 3];
    let coeffs = s.coeffs();
    let wn = super::grid::Wavenumbers::new(s.grid());
    wn.for_each_mode(s.grid(), |idx, k| {
        let e = coeffs[idx].norm_sqr();
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let w = 1.0 + k2;
        acc[0] += e;
        acc[1] += w * e;
        acc[2] += w * w * e;
        acc[3] += w * w * w * e;
        for i in 0..3 {
            dir[i] += k[i] * k[i] * e;
        }
    });
    let v = s.grid().volume();
    NormReport {
        l2: (acc[0] * v).sqrt(),
        h1: (acc[1] * v).sqrt(),
        h2: (acc[2] * v).sqrt(),
        h3: (acc[3] * v).sqrt(),
        linf: 0.0,
        d: dir.map(|x| (x * v).sqrt()),
    }
}

/// `||f||_{H^s}^2` with the `(1 + |k|^2)^s` weight.
pub fn sobolev_sq(s: &Spectrum, order: i32) -> f64 {
    s.weighted_sq(|k| (1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).powi(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Parity, SpectralGrid};
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norms() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        assert_eq!(norms(&Field::zeros(g, Parity::Even)), NormReport::default());
    }

    #[test]
    fn sine_l2_matches_quadrature() {
        // oracle: integral of sin^2(2 pi x1) over (0,1)^2 x (-a,a) is volume / 2
        for a in [0.5, 1.0, 1.7] {
            let g = SpectralGrid::new(16, 8, 12, a).unwrap();
            let f = Field::from_fn(g, Parity::Even, |x| (2.0 * PI * x[0]).sin());
            let r = norms(&f);
            assert!((r.l2 - (a).sqrt()).abs() < 1e-12);
            assert!((r.l2 - f.l2_norm()).abs() < 1e-12);
            assert!((r.d[0] - 2.0 * PI * a.sqrt()).abs() < 1e-11);
            assert!((r.linf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn h1_is_l2_plus_directional() {
        let g = SpectralGrid::cubic(12, 0.8).unwrap();
        let f = Field::from_fn(g, Parity::None, |x| {
            (2.0 * PI * x[0]).cos() * (4.0 * PI * x[1]).sin() + (PI * x[2] / 0.8).sin()
        });
        let r = norms(&f);
        let expect = r.l2 * r.l2 + r.d.iter().map(|d| d * d).sum::<f64>();
        assert!((r.h1 * r.h1 - expect).abs() < 1e-10 * expect);
        assert!(r.l2 <= r.h1 && r.h1 <= r.h2 && r.h2 <= r.h3);
    }
}
