//! Tracer mass budget: the change of `int c` over a step against `dt int s`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TracerBudget {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    /// Per step: `|Delta int c - dt (int s_0 + int s_1) / 2|`.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    prev_source: Option<f64>,
}

impl TracerBudget {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `int c` and `int s` at time `t`.
    pub fn push(&mut self, t: f64, mass: f64, source_mass: f64) {
        if let (Some(&t0), Some(&m0), Some(s0)) = (self.t.last(), self.mass.last(), self.prev_source) {
            let r = (mass - m0 - 0.5 * (t - t0) * (s0 + source_mass)).abs();
            self.residual.push(r);
            self.max_residual = self.max_residual.max(r);
        }
        self.t.push(t);
        self.mass.push(mass);
        self.prev_source = Some(source_mass);
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}
