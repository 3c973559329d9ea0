//! Maximum-principle monitor for the hydrostatic concentration.

use serde::{Deserialize, Serialize};

use crate::fields::{Field, Parity};
use crate::hydro::HydroState;

pub const MAX_PRINCIPLE_TOL: f64 = 1e-6;

/// Physical concentration `c = c* - z / a` from the shifted variable.
pub fn physical_concentration(shifted: &Field) -> Field {
    let g = *shifted.grid();
    let vals = (0..g.len())
        .map(|idx| {
            let (i1, i2, i3) = g.unravel(idx);
            shifted.values()[idx] - g.point(i1, i2, i3)[2] / g.a
        })
        .collect();
    Field::from_values(g, vals, Parity::Odd).expect("grid-sized")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub t: Vec<f64>,
    pub sup_c: Vec<f64>,
    pub bound: Vec<f64>,
    /// Largest `sup_c - bound`; nonpositive when the bound holds.
    pub worst_margin: f64,
    /// First sample time where the bound failed.
    pub first_violation: Option<f64>,
}

impl MaxPrincipleReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `||c||_inf(t) <= base + slope t + tol` sample by sample. The
/// standard bound uses `base = 1 + ||c0||_inf` and `slope = ||s||_inf`.
pub struct MaxPrincipleMonitor {
    base: f64,
    slope: f64,
    report: MaxPrincipleReport,
}

impl MaxPrincipleMonitor {
    pub fn new(c0_inf: f64, s_inf: f64) -> Self {
        Self::with_envelope(1.0 + c0_inf, s_inf)
    }

    pub fn with_envelope(base: f64, slope: f64) -> Self {
        Self {
            base,
            slope,
            report: MaxPrincipleReport {
                worst_margin: f64::NEG_INFINITY,
                ..MaxPrincipleReport::default()
            },
        }
    }

    pub fn push(&mut self, t: f64, shifted_c: &Field) {
        let sup = physical_concentration(shifted_c).max_abs();
        let bound = self.base + self.slope * t + MAX_PRINCIPLE_TOL;
        let r = &mut self.report;
        r.t.push(t);
        r.sup_c.push(sup);
        r.bound.push(bound);
        r.worst_margin = r.worst_margin.max(sup - bound);
        if sup > bound && r.first_violation.is_none() {
            r.first_violation = Some(t);
        }
    }

    pub fn report(&self) -> &MaxPrincipleReport {
        &self.report
    }
}

/// Bound check over a stored hydrostatic trajectory; `c0` and `s` are in the
/// shifted and physical variables respectively.
pub fn max_principle_check(traj: &[HydroState], c0: &Field, s: &Field) -> MaxPrincipleReport {
    let mut m = MaxPrincipleMonitor::new(physical_concentration(c0).max_abs(), s.max_abs());
    for st in traj {
        m.push(st.t, &st.c);
    }
    m.report
}
