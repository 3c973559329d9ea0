use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{config, Result};

/// Uniform periodic grid on the box (0,1) x (0,1) x (-a,a).
///
/// Storage order everywhere in the crate is x3 fastest, then x2, then x1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Half-height of the extended box.
    pub a: f64,
}

impl SpectralGrid {
    pub fn new(n1: usize, n2: usize, n3: usize, a: f64) -> Result<Self> {
        for (axis, n) in [n1, n2, n3].into_iter().enumerate() {
            if n < 8 || n % 2 != 0 {
                return config(format!(
                    "grid axis {} has {n} points; need an even count >= 8",
                    axis + 1
                ));
            }
        }
        if !(a.is_finite() && a > 0.0) {
            return config(format!("half-height a must be positive, got {a}"));
        }
        Ok(Self { n1, n2, n3, a })
    }

    pub fn cubic(n: usize, a: f64) -> Result<Self> {
        Self::new(n, n, n, a)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Periods of the three axes: (1, 1, 2a).
    pub fn periods(&self) -> [f64; 3] {
        [1.0, 1.0, 2.0 * self.a]
    }

    pub fn spacing(&self) -> [f64; 3] {
        let p = self.periods();
        [p[0] / self.n1 as f64, p[1] / self.n2 as f64, p[2] / self.n3 as f64]
    }

    pub fn volume(&self) -> f64 {
        2.0 * self.a
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n2 + i2) * self.n3 + i3
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let i3 = idx % self.n3;
        let rest = idx / self.n3;
        (rest / self.n2, rest % self.n2, i3)
    }

    /// Physical coordinates of a grid node. The x3 axis starts at -a.
    #[inline]
    pub fn point(&self, i1: usize, i2: usize, i3: usize) -> [f64; 3] {
        let h = self.spacing();
        [i1 as f64 * h[0], i2 as f64 * h[1], -self.a + i3 as f64 * h[2]]
    }

    /// Index of the node at -z for the node with vertical index `i3`.
    #[inline]
    pub fn mirror_z(&self, i3: usize) -> usize {
        (self.n3 - i3) % self.n3
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        self.dims()[axis]
    }

    /// Signed mode number in [-n/2, n/2) for storage index `i` along `axis`.
    #[inline]
    pub fn signed_mode(&self, axis: usize, i: usize) -> i64 {
        signed_mode(self.axis_len(axis), i)
    }

    #[inline]
    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        2.0 * PI * self.signed_mode(axis, i) as f64 / self.periods()[axis]
    }

    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.axis_len(axis)).map(|i| self.wavenumber(axis, i)).collect()
    }

    /// True when the mode survives 2/3-rule truncation along `axis`.
    #[inline]
    pub fn resolved(&self, axis: usize, i: usize) -> bool {
        3 * self.signed_mode(axis, i).unsigned_abs() as usize <= self.axis_len(axis)
    }

    #[inline]
    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.axis_len(axis) / 2
    }
}

#[inline]
pub fn signed_mode(n: usize, i: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Per-axis wavenumber tables, cached for the hot loops of the solvers.
#[derive(Clone, Debug)]
pub struct Wavenumbers {
    pub k: [Vec<f64>; 3],
    pub resolved: [Vec<bool>; 3],
    pub nyquist: [usize; 3],
}

impl Wavenumbers {
    pub fn new(grid: &SpectralGrid) -> Self {
        let k = [grid.wavenumbers(0), grid.wavenumbers(1), grid.wavenumbers(2)];
        let resolved = [0, 1, 2].map(|ax| (0..grid.axis_len(ax)).map(|i| grid.resolved(ax, i)).collect::<Vec<_>>());
        Self {
            k,
            resolved,
            nyquist: [grid.n1 / 2, grid.n2 / 2, grid.n3 / 2],
        }
    }

    /// Visits every mode with its wavenumber vector.
    #[inline]
    pub fn for_each_mode(&self, grid: &SpectralGrid, mut f: impl FnMut(usize, [f64; 3])) {
        let mut idx = 0;
        for i1 in 0..grid.n1 {
            for i2 in 0..grid.n2 {
                for i3 in 0..grid.n3 {
                    f(idx, [self.k[0][i1], self.k[1][i2], self.k[2][i3]]);
                    idx += 1;
                }
            }
        }
    }

    /// Wavenumber with the Nyquist mode zeroed, the convention for odd derivatives.
    #[inline]
    pub fn k_odd(&self, axis: usize, i: usize) -> f64 {
        if i == self.nyquist[axis] {
            0.0
        } else {
            self.k[axis][i]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_axes() {
        assert!(SpectralGrid::new(8, 8, 7, 1.0).is_err());
        assert!(SpectralGrid::new(6, 8, 8, 1.0).is_err());
        assert!(SpectralGrid::new(8, 8, 8, 0.0).is_err());
        assert!(SpectralGrid::new(8, 10, 12, 0.5).is_ok());
    }

    #[test]
    fn signed_alias_range() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.signed_mode(0, i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        // vertical period is 2a
        assert!((g.wavenumber(2, 1) - PI).abs() < 1e-15);
        assert!((g.wavenumber(0, 1) - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn mirror_is_involution_and_maps_z_to_minus_z() {
        let g = SpectralGrid::new(8, 8, 12, 0.7).unwrap();
        for i3 in 0..g.n3 {
            let j = g.mirror_z(i3);
            assert_eq!(g.mirror_z(j), i3);
            let z = g.point(0, 0, i3)[2];
            let zm = g.point(0, 0, j)[2];
            // -a and a are the same node on the periodic axis
            let d = (z + zm).rem_euclid(2.0 * g.a);
            assert!(d < 1e-12 || (2.0 * g.a - d) < 1e-12);
        }
    }

    #[test]
    fn dealias_keeps_a_third() {
        let g = SpectralGrid::cubic(32, 1.0).unwrap();
        let kept = (0..32).filter(|&i| g.resolved(0, i)).count();
        assert_eq!(kept, 21); // |m| <= 10
    }
}
