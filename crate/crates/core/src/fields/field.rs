use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::{SpectralGrid, Wavenumbers};
use crate::error::{config, contract, Result};

/// Declared symmetry of a field under z -> -z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity after one z-derivative.
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    /// Parity of a pointwise product.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// Parity of a sum; mismatched parities lose the tag.
    pub fn sum(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::None
        }
    }

    pub fn sign(self) -> Option<f64> {
        match self {
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
            Parity::None => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even-in-z",
            Parity::Odd => "odd-in-z",
            Parity::None => "none",
        }
    }
}

/// One real scalar field sampled on the periodic grid.
///
/// Real-space values are the stored representation; spectra are computed
/// on demand with [`Field::spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    values: Vec<f64>,
    parity: Parity,
}

impl Field {
    pub fn zeros(grid: SpectralGrid, parity: Parity) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            parity,
        }
    }

    pub fn constant(grid: SpectralGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
            parity: Parity::Even,
        }
    }

    pub fn from_values(grid: SpectralGrid, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return config(format!(
                "field has {} values but grid {}x{}x{} needs {}",
                values.len(),
                grid.n1,
                grid.n2,
                grid.n3,
                grid.len()
            ));
        }
        Ok(Self { grid, values, parity })
    }

    /// Samples `f(x1, x2, x3)` at every node.
    pub fn from_fn(grid: SpectralGrid, parity: Parity, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i1, i2, i3) = grid.unravel(idx);
                f(grid.point(i1, i2, i3))
            })
            .collect();
        Self { grid, values, parity }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn at(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.values[self.grid.index(i1, i2, i3)]
    }

    fn check_same_grid(&self, other: &Field) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
    }

    pub fn add(&self, other: &Field) -> Field {
        self.check_same_grid(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Field {
            grid: self.grid,
            values,
            parity: self.parity.sum(other.parity),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.check_same_grid(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Field {
            grid: self.grid,
            values,
            parity: self.parity.sum(other.parity),
        }
    }

    pub fn scale(&self, s: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            parity: self.parity,
        }
    }

    /// Pointwise product; parities multiply.
    pub fn mul(&self, other: &Field) -> Field {
        self.check_same_grid(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Field {
            grid: self.grid,
            values,
            parity: self.parity.product(other.parity),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            parity: Parity::None,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Quadrature L2 norm over the box.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// L2 inner product over the box.
    pub fn dot(&self, other: &Field) -> f64 {
        self.check_same_grid(other);
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// The field evaluated at -z, node by node.
    pub fn reflect_z(&self) -> Field {
        let g = self.grid;
        let mut values = vec![0.0; g.len()];
        for i1 in 0..g.n1 {
            for i2 in 0..g.n2 {
                for i3 in 0..g.n3 {
                    values[g.index(i1, i2, i3)] = self.values[g.index(i1, i2, g.mirror_z(i3))];
                }
            }
        }
        Field {
            grid: g,
            values,
            parity: self.parity,
        }
    }

    /// `||f(z) - sign * f(-z)||_2` for the declared parity.
    pub fn parity_residual(&self) -> Result<f64> {
        let Some(sign) = self.parity.sign() else {
            return contract("parity residual requested for a field with no declared parity");
        };
        let r = self.reflect_z();
        let sq: f64 = self
            .values
            .iter()
            .zip(&r.values)
            .map(|(a, b)| (a - sign * b).powi(2))
            .sum();
        Ok((sq * self.grid.cell_volume()).sqrt())
    }

    /// Projects onto the declared parity class; a no-op for `Parity::None`.
    pub fn symmetrize(&self) -> Field {
        let Some(sign) = self.parity.sign() else {
            return self.clone();
        };
        let r = self.reflect_z();
        let values = self
            .values
            .iter()
            .zip(&r.values)
            .map(|(a, b)| 0.5 * (a + sign * b))
            .collect();
        Field {
            grid: self.grid,
            values,
            parity: self.parity,
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        fft_forward(self)
    }
}

/// Fourier coefficients of a field, normalized so the zero mode is the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl Spectrum {
    pub fn zeros(grid: SpectralGrid, parity: Parity) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            parity,
        }
    }

    pub fn from_coeffs(grid: SpectralGrid, coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return config(format!(
                "spectrum has {} coefficients but grid needs {}",
                coeffs.len(),
                grid.len()
            ));
        }
        Ok(Self { grid, coeffs, parity })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn to_field(&self) -> Field {
        fft_inverse(self)
    }

    /// Largest imaginary part left after the inverse transform, i.e. how far
    /// the coefficients are from Hermitian symmetry.
    pub fn imaginary_residue(&self) -> f64 {
        fft::coeffs_to_complex(&self.coeffs, self.grid.dims())
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.im.abs()))
    }

    /// Squared L2 norm via Parseval.
    pub fn l2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()
    }

    /// `V * sum_k w(k) |c_k|^2` for a mode weight `w`.
    pub fn weighted_sq(&self, w: impl Fn([f64; 3]) -> f64) -> f64 {
        let wn = Wavenumbers::new(&self.grid);
        let mut acc = 0.0;
        wn.for_each_mode(&self.grid, |idx, k| {
            acc += w(k) * self.coeffs[idx].norm_sqr();
        });
        acc * self.grid.volume()
    }

    /// Multiplies every coefficient by a mode-dependent complex factor.
    pub fn apply(&self, f: impl Fn([f64; 3], [usize; 3]) -> Complex64) -> Spectrum {
        let g = self.grid;
        let wn = Wavenumbers::new(&g);
        let mut out = self.clone();
        let mut idx = 0;
        for i1 in 0..g.n1 {
            for i2 in 0..g.n2 {
                for i3 in 0..g.n3 {
                    let k = [wn.k[0][i1], wn.k[1][i2], wn.k[2][i3]];
                    out.coeffs[idx] *= f(k, [i1, i2, i3]);
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Spectrum) -> Spectrum {
        assert_eq!(self.grid, other.grid);
        Spectrum {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            parity: self.parity.sum(other.parity),
        }
    }

    pub fn scale(&self, s: f64) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            parity: self.parity,
        }
    }
}

/// Forward transform of a real field.
pub fn fft_forward(f: &Field) -> Spectrum {
    Spectrum {
        grid: f.grid,
        coeffs: fft::real_to_coeffs(&f.values, f.grid.dims()),
        parity: f.parity,
    }
}

/// Inverse transform back to real space.
pub fn fft_inverse(s: &Spectrum) -> Field {
    Field {
        grid: s.grid,
        values: fft::coeffs_to_real(&s.coeffs, s.grid.dims()),
        parity: s.parity,
    }
}
