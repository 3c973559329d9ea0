//! Discrete energy inequality for anisotropic runs.

use serde::{Deserialize, Serialize};

use crate::aniso::AnisoState;
use crate::error::{contract, Result};
use crate::fields::{Field, SpectralGrid};
use crate::model::PhysicalParams;
use crate::ops::SpectralOps;

/// Time series of every term of the energy inequality. Dissipation and
/// work entries are accumulated integrals from the first sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub t: Vec<f64>,
    /// `||u_h||^2 / 2`.
    pub kinetic_h: Vec<f64>,
    /// `eps^2 ||u3||^2 / 2`.
    pub kinetic_3_weighted: Vec<f64>,
    /// `||c||^2 / 2`.
    pub concentration_l2: Vec<f64>,
    pub dissipation_visc_h: Vec<f64>,
    pub dissipation_visc_3_weighted: Vec<f64>,
    /// `K2 ||d2 c||^2 + K3 ||d3 c||^2` part.
    pub dissipation_c: Vec<f64>,
    /// `eps K1 ||d1 c||^2` part.
    pub dissipation_c_downwind: Vec<f64>,
    /// `(s, c)`.
    pub source_work: Vec<f64>,
    /// `(u3, c) / a`, the work of the shift term of the concentration equation.
    pub coupling_work: Vec<f64>,
    /// LHS minus RHS of the inequality.
    pub slack: Vec<f64>,
}

impl EnergyBudget {
    pub fn energy(&self, i: usize) -> f64 {
        self.kinetic_h[i] + self.kinetic_3_weighted[i] + self.concentration_l2[i]
    }

    pub fn dissipation(&self, i: usize) -> f64 {
        self.dissipation_visc_h[i]
            + self.dissipation_visc_3_weighted[i]
            + self.dissipation_c[i]
            + self.dissipation_c_downwind[i]
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub budget: EnergyBudget,
    /// Largest slack divided by `E(0) + int |work|`.
    pub max_relative_slack: f64,
    pub max_abs_relative_slack: f64,
    pub scale: f64,
}

impl EnergyReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_relative_slack <= tol
    }
}

/// Integral over one step of a mode amplitude sampled at both ends,
/// exact for exponential decay and second order otherwise.
fn log_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.5 * (a + b);
    }
    let r = a / b;
    if (r - 1.0).abs() < 1e-6 {
        return 0.5 * (a + b);
    }
    (a - b) / r.ln()
}

struct Sample {
    t: f64,
    qh: Vec<f64>,
    q3: Vec<f64>,
    qc: Vec<f64>,
    work: f64,
    coupling: f64,
}

/// Streaming energy monitor; feed it every state of a run.
pub struct EnergyMonitor {
    params: PhysicalParams,
    ops: SpectralOps,
    dt: Option<f64>,
    prev: Option<Sample>,
    budget: EnergyBudget,
    work_abs: f64,
}

impl EnergyMonitor {
    pub fn new(grid: SpectralGrid, params: PhysicalParams) -> Self {
        Self {
            params,
            ops: SpectralOps::new(grid),
            dt: None,
            prev: None,
            budget: EnergyBudget::default(),
            work_abs: 0.0,
        }
    }

    pub fn push(&mut self, state: &AnisoState, source: Option<&Field>) -> Result<()> {
        let ops = &self.ops;
        if state.grid() != &ops.grid {
            return contract("state grid differs from monitor grid");
        }
        let v = ops.grid.volume();
        let eps = self.params.eps;
        let [u1, u2, u3, c] = [&state.u1, &state.u2, &state.u3, &state.c].map(|f| ops.forward(f.values()));
        let qh: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        let q3: Vec<f64> = u3.iter().map(|a| a.norm_sqr()).collect();
        let qc: Vec<f64> = c.iter().map(|a| a.norm_sqr()).collect();
        let work = source.map_or(0.0, |s| s.dot(&state.c));
        let coupling = state.u3.dot(&state.c) / self.params.a;
        let cur = Sample {
            t: state.t,
            work,
            coupling,
            qh,
            q3,
            qc,
        };
        let b = &mut self.budget;
        b.t.push(cur.t);
        b.kinetic_h.push(0.5 * v * cur.qh.iter().sum::<f64>());
        b.kinetic_3_weighted
            .push(0.5 * eps * eps * v * cur.q3.iter().sum::<f64>());
        b.concentration_l2.push(0.5 * v * cur.qc.iter().sum::<f64>());
        let last = |x: &Vec<f64>| x.last().copied().unwrap_or(0.0);
        let mut acc = [
            last(&b.dissipation_visc_h),
            last(&b.dissipation_visc_3_weighted),
            last(&b.dissipation_c),
            last(&b.dissipation_c_downwind),
            last(&b.source_work),
            last(&b.coupling_work),
        ];
        if let Some(prev) = &self.prev {
            let h = cur.t - prev.t;
            match self.dt {
                None => self.dt = Some(h),
                Some(dt) if (h - dt).abs() > 1e-9 * dt.max(1e-300) => {
                    return contract(format!("non-uniform sampling: step {h} after {dt}"));
                }
                _ => {}
            }
            if !(h > 0.0) {
                return contract("samples must advance in time");
            }
            let nu = self.params.viscosity();
            let kd = [eps * self.params.k1, self.params.k2, self.params.k3];
            let mut d = [0.0; 4];
            for idx in 0..cur.qh.len() {
                let k = ops.k[idx];
                let kk = [k[0] * k[0], k[1] * k[1], k[2] * k[2]];
                let lv = nu[0] * kk[0] + nu[1] * kk[1] + nu[2] * kk[2];
                d[0] += lv * log_mean(prev.qh[idx], cur.qh[idx]);
                d[1] += lv * log_mean(prev.q3[idx], cur.q3[idx]);
                let mc = log_mean(prev.qc[idx], cur.qc[idx]);
                d[2] += (kd[1] * kk[1] + kd[2] * kk[2]) * mc;
                d[3] += kd[0] * kk[0] * mc;
            }
            acc[0] += v * h * d[0];
            acc[1] += eps * eps * v * h * d[1];
            acc[2] += v * h * d[2];
            acc[3] += v * h * d[3];
            acc[4] += 0.5 * h * (prev.work + cur.work);
            acc[5] += 0.5 * h * (prev.coupling + cur.coupling);
            self.work_abs += 0.5 * h * ((prev.work + prev.coupling).abs() + (cur.work + cur.coupling).abs());
        }
        b.dissipation_visc_h.push(acc[0]);
        b.dissipation_visc_3_weighted.push(acc[1]);
        b.dissipation_c.push(acc[2]);
        b.dissipation_c_downwind.push(acc[3]);
        b.source_work.push(acc[4]);
        b.coupling_work.push(acc[5]);
        let i = b.len() - 1;
        let slack = b.energy(i) + b.dissipation(i) - b.energy(0) - acc[4] - acc[5];
        b.slack.push(slack);
        self.prev = Some(cur);
        Ok(())
    }

    pub fn budget(&self) -> &EnergyBudget {
        &self.budget
    }

    pub fn report(&self) -> EnergyReport {
        let b = &self.budget;
        let e0 = if b.is_empty() { 0.0 } else { b.energy(0) };
        let scale = (e0 + self.work_abs).max(f64::MIN_POSITIVE);
        let max_rel = b.slack.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s / scale));
        let max_abs = b.slack.iter().fold(0.0_f64, |m, &s| m.max((s / scale).abs()));
        EnergyReport {
            budget: b.clone(),
            max_relative_slack: if b.is_empty() { 0.0 } else { max_rel },
            max_abs_relative_slack: max_abs,
            scale,
        }
    }
}

/// Energy inequality over a stored trajectory sampled at uniform steps.
pub fn energy_check(traj: &[AnisoState], params: &PhysicalParams, source: Option<&Field>) -> Result<EnergyReport> {
    let Some(first) = traj.first() else {
        return contract("empty trajectory");
    };
    let mut m = EnergyMonitor::new(*first.grid(), *params);
    for s in traj {
        m.push(s, source)?;
    }
    Ok(m.report())
}

/// Ratios of successive slack magnitudes over a dt-halving series.
pub fn halving_ratios(reports: &[EnergyReport]) -> Vec<f64> {
    reports
        .windows(2)
        .map(|w| w[0].max_abs_relative_slack / w[1].max_abs_relative_slack)
        .collect()
}
