use num_complex::Complex64;

use super::field::{Field, Spectrum};
use super::grid::Wavenumbers;

/// Coordinate axis of the box; `X3` is vertical.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }
}

/// `order`-th spectral derivative along `axis`. The Nyquist mode is dropped
/// so that repeated first derivatives agree with higher-order ones.
pub fn derive_spectrum(s: &Spectrum, axis: Axis, order: u32) -> Spectrum {
    let ax = axis.index();
    let g = *s.grid();
    let wn = Wavenumbers::new(&g);
    let mut out = s.clone();
    let factors: Vec<Complex64> = (0..g.axis_len(ax))
        .map(|i| Complex64::new(0.0, wn.k_odd(ax, i)).powu(order))
        .collect();
    let [_, n2, n3] = g.dims();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let i = match ax {
            0 => idx / (n2 * n3),
            1 => (idx / n3) % n2,
            _ => idx % n3,
        };
        *c *= factors[i];
    }
    let parity = if ax == 2 && order % 2 == 1 {
        s.parity().flip()
    } else {
        s.parity()
    };
    out.with_parity(parity)
}

pub fn derive(f: &Field, axis: Axis, order: u32) -> Field {
    derive_spectrum(&f.spectrum(), axis, order).to_field()
}

/// Zeroes every mode with |m| > n/3 on any axis.
pub fn dealias(s: &Spectrum) -> Spectrum {
    let mut out = s.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(s: &mut Spectrum) {
    let g = *s.grid();
    let wn = Wavenumbers::new(&g);
    let [n1, n2, n3] = g.dims();
    let coeffs = s.coeffs_mut();
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            for i3 in 0..n3 {
                if !(wn.resolved[0][i1] && wn.resolved[1][i2] && wn.resolved[2][i3]) {
                    coeffs[(i1 * n2 + i2) * n3 + i3] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// Dealiased pointwise product of two fields.
pub fn dealiased_product(a: &Field, b: &Field) -> Field {
    dealias(&a.mul(b).spectrum()).to_field()
}

/// Anisotropic Laplacian `w1 d11 + w2 d22 + w3 d33` applied spectrally.
pub fn weighted_laplacian(f: &Field, w: [f64; 3]) -> Field {
    f.spectrum()
        .apply(|k, _| Complex64::new(-(w[0] * k[0] * k[0] + w[1] * k[1] * k[1] + w[2] * k[2] * k[2]), 0.0))
        .to_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Parity, SpectralGrid};
    use std::f64::consts::PI;

    #[test]
    fn first_derivative_of_sine() {
        let g = SpectralGrid::cubic(16, 1.0).unwrap();
        let f = Field::from_fn(g, Parity::Even, |x| (2.0 * PI * x[0]).sin());
        let d = derive(&f, Axis::X1, 1);
        let exact = Field::from_fn(g, Parity::Even, |x| 2.0 * PI * (2.0 * PI * x[0]).cos());
        assert!(d.sub(&exact).max_abs() < 1e-12);
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        // oracle: centered differences of the analytic function, h -> 0
        let g = SpectralGrid::cubic(16, 1.0).unwrap();
        let f = |x2: f64| (4.0 * PI * x2).cos();
        let d = derive(&Field::from_fn(g, Parity::Even, |x| f(x[1])), Axis::X2, 2);
        let h = 1e-4;
        for i2 in 0..g.n2 {
            let x2 = g.point(0, i2, 0)[1];
            let fd = (f(x2 + h) - 2.0 * f(x2) + f(x2 - h)) / (h * h);
            assert!((d.at(3, i2, 5) - fd).abs() < 1e-3 * 16.0 * PI * PI);
            assert!((d.at(3, i2, 5) + 16.0 * PI * PI * f(x2)).abs() < 1e-10);
        }
    }

    #[test]
    fn z_derivative_flips_parity() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        let f = Field::from_fn(g, Parity::Even, |x| (PI * x[2]).cos());
        let d = derive(&f, Axis::X3, 1);
        assert_eq!(d.parity(), Parity::Odd);
        assert!(d.parity_residual().unwrap() < 1e-12);
        assert_eq!(derive(&f, Axis::X3, 2).parity(), Parity::Even);
        assert_eq!(derive(&f, Axis::X1, 1).parity(), Parity::Even);
    }

    #[test]
    fn dealias_zeroes_exactly_the_top_third() {
        let g = SpectralGrid::new(12, 8, 10, 1.0).unwrap();
        let f = Field::from_fn(g, Parity::None, |x| {
            (x[0] * 91.7).sin() + (x[1] * 13.1 + x[2] * 7.3).cos() * (x[0] * 5.0).exp()
        });
        let s = dealias(&f.spectrum());
        for (idx, c) in s.coeffs().iter().enumerate() {
            let (i1, i2, i3) = g.unravel(idx);
            let keep = g.resolved(0, i1) && g.resolved(1, i2) && g.resolved(2, i3);
            if keep {
                assert_eq!(*c, f.spectrum().coeffs()[idx]);
            } else {
                assert_eq!(*c, Complex64::new(0.0, 0.0));
            }
        }
        assert_eq!(dealias(&s), s);
    }
}
