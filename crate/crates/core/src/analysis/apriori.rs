//! Uniform-in-eps bounds on the anisotropic solutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::aniso::AnisoState;
use crate::error::{contract, Result};
use crate::fields::sobolev_sq;

/// Names of the tracked quantities, in report order.
pub const APRIORI_KEYS: [&str; 11] = [
    "linf_l2_u1",
    "linf_l2_u2",
    "linf_l2_eps_u3",
    "linf_l2_c",
    "l2_l2_u3",
    "l2_h1_u1",
    "l2_h1_u2",
    "l2_h1_eps_u3",
    "l2_l2_sqrt_eps_d1c",
    "l2_l2_d2c",
    "l2_l2_d3c",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriRun {
    pub eps: f64,
    pub samples: usize,
    pub t_end: f64,
    pub values: BTreeMap<String, f64>,
}

/// Accumulates sup-in-time and time-integrated norms of one run.
pub struct AprioriMonitor {
    eps: f64,
    sup: [f64; 4],
    int: [f64; 7],
    prev: Option<(f64, [f64; 7])>,
    samples: usize,
}

impl AprioriMonitor {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            sup: [0.0; 4],
            int: [0.0; 7],
            prev: None,
            samples: 0,
        }
    }

    pub fn push(&mut self, s: &AnisoState) {
        let e = self.eps;
        let [u1, u2, u3, c] = [&s.u1, &s.u2, &s.u3, &s.c].map(|f| f.spectrum());
        let l2 = [u1.l2_sq(), u2.l2_sq(), u3.l2_sq(), c.l2_sq()];
        let sup = [l2[0], l2[1], e * e * l2[2], l2[3]].map(f64::sqrt);
        for i in 0..4 {
            self.sup[i] = self.sup[i].max(sup[i]);
        }
        let d = |ax: usize| c.weighted_sq(|k| k[ax] * k[ax]);
        let rates = [
            l2[2],
            sobolev_sq(&u1, 1),
            sobolev_sq(&u2, 1),
            e * e * sobolev_sq(&u3, 1),
            e * d(0),
            d(1),
            d(2),
        ];
        if let Some((t0, r0)) = self.prev {
            let h = s.t - t0;
            for i in 0..7 {
                self.int[i] += 0.5 * h * (r0[i] + rates[i]);
            }
        }
        self.prev = Some((s.t, rates));
        self.samples += 1;
    }

    pub fn finish(&self) -> AprioriRun {
        let vals = self.sup.iter().copied().chain(self.int.iter().map(|x| x.sqrt()));
        AprioriRun {
            eps: self.eps,
            samples: self.samples,
            t_end: self.prev.map_or(0.0, |p| p.0),
            values: APRIORI_KEYS.iter().map(|k| k.to_string()).zip(vals).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriVerdict {
    /// Per quantity: max over the two smallest eps divided by the max over the rest.
    pub ratios: BTreeMap<String, f64>,
    pub limit: f64,
    pub pass: bool,
}

pub const APRIORI_GROWTH_LIMIT: f64 = 1.5;

/// Checks that no tracked quantity grows as eps decreases: the largest value
/// over the two smallest eps must stay within 1.5 times the largest value
/// over all other eps.
pub fn apriori_check(runs: &[AprioriRun]) -> Result<AprioriVerdict> {
    if runs.len() < 3 {
        return contract(format!("a priori check needs at least 3 runs, got {}", runs.len()));
    }
    let first = &runs[0];
    for r in runs {
        if r.samples != first.samples || (r.t_end - first.t_end).abs() > 1e-12 * first.t_end.abs().max(1.0) {
            return contract("sweep runs differ in sampling");
        }
        if r.values.keys().ne(first.values.keys()) {
            return contract("sweep runs track different quantities");
        }
    }
    let mut sorted: Vec<&AprioriRun> = runs.iter().collect();
    sorted.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    if sorted.windows(2).any(|w| w[0].eps == w[1].eps) {
        return contract("sweep eps values must be distinct");
    }
    let (small, rest) = sorted.split_at(2);
    let mut ratios = BTreeMap::new();
    let mut pass = true;
    for key in first.values.keys() {
        let m = |g: &[&AprioriRun]| g.iter().map(|r| r.values[key]).fold(0.0, f64::max);
        let (s, r) = (m(small), m(rest));
        let ratio = if r == 0.0 {
            if s == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            s / r
        };
        pass &= ratio <= APRIORI_GROWTH_LIMIT;
        ratios.insert(key.clone(), ratio);
    }
    Ok(AprioriVerdict {
        ratios,
        limit: APRIORI_GROWTH_LIMIT,
        pass,
    })
}
