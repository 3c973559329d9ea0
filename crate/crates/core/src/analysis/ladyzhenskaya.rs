//! Sampling experiment for the Ladyzhenskaya-type trilinear inequalities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::fields::{derive, Axis, Field, Parity, SpectralGrid};
use crate::ops::{random_coeffs, SpectralOps};

/// The three sides of both inequalities for one triplet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadyzhenskayaTerms {
    pub lhs: f64,
    /// Horizontal regularity on `f` and `h`.
    pub rhs_fh: f64,
    /// Horizontal regularity on `g` and `h`.
    pub rhs_gh: f64,
}

impl LadyzhenskayaTerms {
    /// `[lhs / rhs_fh, lhs / rhs_gh]`, or `None` when a right side vanishes.
    pub fn ratios(&self) -> Option<[f64; 2]> {
        if self.rhs_fh > 0.0 && self.rhs_gh > 0.0 {
            Some([self.lhs / self.rhs_fh, self.lhs / self.rhs_gh])
        } else {
            None
        }
    }
}

fn horizontal_gradient_norm(f: &Field) -> f64 {
    let a = derive(f, Axis::X1, 1).l2_norm();
    let b = derive(f, Axis::X2, 1).l2_norm();
    (a * a + b * b).sqrt()
}

/// `int_{Omega_2} (int |f| dz)(int |g h| dz)` and both right-hand sides.
pub fn ladyzhenskaya_terms(f: &Field, g: &Field, h: &Field) -> LadyzhenskayaTerms {
    let grid = *f.grid();
    let dz = grid.spacing()[2];
    let da = grid.spacing()[0] * grid.spacing()[1];
    let n3 = grid.n3;
    let (fv, gv, hv) = (f.values(), g.values(), h.values());
    let lhs: f64 = (0..grid.n1 * grid.n2)
        .map(|col| {
            let r = col * n3..(col + 1) * n3;
            let cf: f64 = fv[r.clone()].iter().map(|x| x.abs()).sum::<f64>() * dz;
            let cgh: f64 = r.map(|i| (gv[i] * hv[i]).abs()).sum::<f64>() * dz;
            cf * cgh
        })
        .sum::<f64>()
        * da;
    let half = |x: &Field| {
        let n = x.l2_norm();
        n.sqrt() * (n.sqrt() + horizontal_gradient_norm(x).sqrt())
    };
    let (nf, ng) = (f.l2_norm(), g.l2_norm());
    let hh = half(h);
    LadyzhenskayaTerms {
        lhs,
        rhs_fh: half(f) * ng * hh,
        rhs_gh: nf * half(g) * hh,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub max_over_median: f64,
}

impl RatioStats {
    fn from(mut v: Vec<f64>) -> Self {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Self {
            min: v[0],
            median,
            max: v[n - 1],
            max_over_median: v[n - 1] / median,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadyzhenskayaStats {
    pub samples: usize,
    pub skipped: usize,
    pub fh: RatioStats,
    pub gh: RatioStats,
}

impl LadyzhenskayaStats {
    pub fn holds(&self, limit: f64) -> bool {
        self.fh.max_over_median <= limit && self.gh.max_over_median <= limit
    }
}

fn random_field(ops: &SpectralOps, rng: &mut ChaCha8Rng, bandlimit: usize) -> Field {
    let c = random_coeffs(&ops.grid, rng, bandlimit);
    Field::from_values(ops.grid, ops.inverse(&c), Parity::None).expect("grid-sized")
}

/// Ratio statistics over `n_samples` random band-limited triplets; sample `i`
/// is drawn from its own stream so results do not depend on thread count.
pub fn ladyzhenskaya_sample(
    grid: &SpectralGrid,
    seed: u64,
    n_samples: usize,
    bandlimit: usize,
) -> Result<LadyzhenskayaStats> {
    if n_samples == 0 {
        return contract("need at least one sample");
    }
    if bandlimit == 0 || 3 * bandlimit >= grid.n1.min(grid.n2).min(grid.n3) {
        return contract(format!("bandlimit {bandlimit} out of range for the grid"));
    }
    let ops = SpectralOps::new(*grid);
    let ratios: Vec<Option<[f64; 2]>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let [f, g, h] = [(); 3].map(|_| random_field(&ops, &mut rng, bandlimit));
            ladyzhenskaya_terms(&f, &g, &h).ratios()
        })
        .collect();
    let kept: Vec<[f64; 2]> = ratios.iter().flatten().copied().collect();
    if kept.is_empty() {
        return contract("every sample had a vanishing right-hand side");
    }
    Ok(LadyzhenskayaStats {
        samples: kept.len(),
        skipped: n_samples - kept.len(),
        fh: RatioStats::from(kept.iter().map(|r| r[0]).collect()),
        gh: RatioStats::from(kept.iter().map(|r| r[1]).collect()),
    })
}
