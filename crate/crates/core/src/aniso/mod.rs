//! Scaled anisotropic system on the periodic box.

mod init;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, contract, Error, Result};
use crate::fields::{Field, Parity, SpectralGrid};
use crate::forcing::Forcing;
use crate::hydro::{finish, DriftGauge};
use crate::model::PhysicalParams;
use crate::ops::{all_finite, axpy, Coeffs, EtdWeights, SpectralOps, I};

pub use init::init_random_state;

#[derive(Clone, Debug, PartialEq)]
pub struct AnisoState {
    pub u1: Field,
    pub u2: Field,
    pub u3: Field,
    /// Shifted concentration (odd in z).
    pub c: Field,
    pub p: Field,
    pub t: f64,
}

impl AnisoState {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            u1: Field::zeros(*grid, Parity::Even),
            u2: Field::zeros(*grid, Parity::Even),
            u3: Field::zeros(*grid, Parity::Odd),
            c: Field::zeros(*grid, Parity::Odd),
            p: Field::zeros(*grid, Parity::Even),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.u1.grid()
    }

    /// `||div u|| / ||grad u||` (0 for a constant flow).
    pub fn divergence_ratio(&self) -> f64 {
        let ops = SpectralOps::new(*self.grid());
        let u = [&self.u1, &self.u2, &self.u3].map(|f| ops.forward(f.values()));
        let mut div = 0.0;
        let mut grad = 0.0;
        for idx in 0..u[0].len() {
            let k = ops.k[idx];
            let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            div += (k[0] * u[0][idx] + k[1] * u[1][idx] + k[2] * u[2][idx]).norm_sqr();
            grad += kk * (u[0][idx].norm_sqr() + u[1][idx].norm_sqr() + u[2][idx].norm_sqr());
        }
        if grad == 0.0 {
            0.0
        } else {
            (div / grad).sqrt()
        }
    }

    /// Largest parity residual relative to the field size.
    pub fn parity_defect(&self) -> f64 {
        [&self.u1, &self.u2, &self.u3, &self.c, &self.p]
            .iter()
            .map(|f| f.parity_residual().unwrap_or(f64::INFINITY) / f.l2_norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Time-step settings of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    /// Largest admissible advective Courant number.
    pub cfl_safety: f64,
    /// Enforce `dt <= COUPLING_CAP * eps / (2 f)`.
    pub eps_dt_coupling: bool,
}

pub const COUPLING_CAP: f64 = 0.5;

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 0.5,
            cfl_safety: 0.9,
            eps_dt_coupling: true,
        }
    }
}

impl StepControl {
    /// Step-size cap induced by the explicit O(1/eps) Coriolis term.
    pub fn coupling_cap(params: &PhysicalParams) -> f64 {
        if params.f == 0.0 {
            f64::INFINITY
        } else {
            COUPLING_CAP * params.eps / (2.0 * params.f)
        }
    }

    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return config(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return config(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return config(format!("cfl_safety must lie in (0, 1), got {}", self.cfl_safety));
        }
        let cap = Self::coupling_cap(params);
        if self.eps_dt_coupling && self.dt > cap * (1.0 + 1e-12) {
            return config(format!(
                "dt = {} exceeds the coupling cap {cap} for eps = {}",
                self.dt, params.eps
            ));
        }
        Ok(())
    }

    /// Number of steps to reach `t_end` (the last step lands on it).
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// Advective Courant number `dt * sum_i max|u_i| / h_i`.
pub fn courant(fields: [&Field; 3], dt: f64) -> f64 {
    let h = fields[0].grid().spacing();
    (0..3).map(|i| fields[i].max_abs() / h[i]).sum::<f64>() * dt
}

/// Full tendencies (diffusion included, pressure excluded).
#[derive(Clone, Debug)]
pub struct AnisoTendency {
    pub f1: Field,
    pub f2: Field,
    pub f3: Field,
    pub fc: Field,
}

/// Explicit tendency at a state, already projected; reusable as the first
/// stage of the next step.
pub struct AnisoCache {
    t: f64,
    e: [Coeffs; 4],
    p: Coeffs,
}

pub struct AnisoSolver {
    params: PhysicalParams,
    ops: SpectralOps,
    drift: DriftGauge,
}

/// Projects `f` onto weighted-divergence-free fields in place, returning
/// the pressure coefficients.
fn project_spec(ops: &SpectralOps, eps: f64, f: &mut [Coeffs; 3]) -> Coeffs {
    let inv_e2 = 1.0 / (eps * eps);
    let [f1, f2, f3] = f;
    let mut p = vec![Complex64::new(0.0, 0.0); f1.len()];
    p.par_iter_mut()
        .zip(f1.par_iter_mut())
        .zip(f2.par_iter_mut())
        .zip(f3.par_iter_mut())
        .zip(ops.k.par_iter())
        .for_each(|((((p, a), b), c), k)| {
            let d = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] * inv_e2;
            if d == 0.0 {
                return;
            }
            let ph = -I * (k[0] * *a + k[1] * *b + k[2] * *c) / d;
            *a -= I * k[0] * ph;
            *b -= I * k[1] * ph;
            *c -= I * k[2] * inv_e2 * ph;
            *p = ph;
        });
    p
}

/// Splits `F` into a divergence-free part `G` and the pressure `p` with
/// `F = G + (d1 p, d2 p, d3 p / eps^2)`.
pub fn project_weighted(f1: &Field, f2: &Field, f3: &Field, eps: f64) -> Result<([Field; 3], Field)> {
    if !(eps > 0.0) {
        return config(format!("eps must be positive, got {eps}"));
    }
    let g = *f1.grid();
    if f2.grid() != &g || f3.grid() != &g {
        return contract("projection inputs live on different grids");
    }
    let ops = SpectralOps::new(g);
    let mut c = [f1, f2, f3].map(|f| ops.forward(f.values()));
    let p = project_spec(&ops, eps, &mut c);
    let par = [f1.parity(), f2.parity(), f3.parity()];
    let out = [0, 1, 2].map(|i| Field::from_values(g, ops.inverse(&c[i]), par[i]).expect("grid-sized"));
    let p = Field::from_values(g, ops.inverse(&p), f1.parity())?;
    Ok((out, p))
}

impl AnisoSolver {
    pub fn new(grid: SpectralGrid, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        if (grid.a - params.a).abs() > 1e-14 * params.a {
            return config(format!(
                "grid half-height {} differs from parameter a = {}",
                grid.a, params.a
            ));
        }
        Ok(Self {
            params,
            ops: SpectralOps::new(grid),
            drift: DriftGauge::default(),
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.ops.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Largest relative parity drift of the last step, measured before the
    /// fields were re-symmetrized.
    pub fn last_parity_drift(&self) -> f64 {
        self.drift.get()
    }

    fn explicit(&self, u: &[Coeffs; 4], t: f64, forcing: &dyn Forcing) -> Result<AnisoCache> {
        let ops = &self.ops;
        let r = [&u[0], &u[1], &u[2]].map(|c| ops.inverse(c));
        if !r.iter().all(|v| all_finite(v)) {
            return Err(Error::BlowUp {
                time: t,
                what: "non-finite velocity".into(),
            });
        }
        let adv = |c: &Coeffs| -> Coeffs {
            let g = ops.grad_real(c);
            let n: Vec<f64> = (0..r[0].len())
                .into_par_iter()
                .map(|i| r[0][i] * g[0][i] + r[1][i] * g[1][i] + r[2][i] * g[2][i])
                .collect();
            ops.forward_dealiased(&n)
        };
        let n = [0, 1, 2, 3].map(|i| adv(&u[i]));
        let eps = self.params.eps;
        let cor = self.params.coriolis();
        let inv_a = 1.0 / self.params.a;
        let len = n[0].len();
        // The cross terms coupling u_h and u3 are applied through the parity
        // projector; on states with the declared symmetry they vanish.
        let u3_even = ops.parity_part(&u[2], 1.0);
        let uh_odd = [0, 1].map(|i| ops.parity_part(&u[i], -1.0));
        let e1: Coeffs = (0..len)
            .map(|i| -n[0][i] + cor.gamma * u[1][i] - eps * cor.beta * u3_even[i])
            .collect();
        let e2: Coeffs = (0..len)
            .map(|i| -n[1][i] - cor.gamma * u[0][i] + eps * cor.alpha * u3_even[i])
            .collect();
        let e3: Coeffs = (0..len)
            .map(|i| -n[2][i] + (cor.beta * uh_odd[0][i] - cor.alpha * uh_odd[1][i]) / eps)
            .collect();
        let mut ec: Coeffs = (0..len).map(|i| -n[3][i] + inv_a * u[2][i]).collect();
        let mut e = [e1, e2, e3];
        let terms = forcing.at(t);
        if let Some(m) = &terms.momentum {
            for i in 0..3 {
                axpy(&mut e[i], 1.0, &ops.forward_dealiased(m[i].values()));
            }
        }
        if let Some(s) = &terms.tracer {
            axpy(&mut ec, 1.0, &ops.forward_dealiased(s.values()));
        }
        let p = project_spec(ops, eps, &mut e);
        let [e1, e2, e3] = e;
        Ok(AnisoCache {
            t,
            e: [e1, e2, e3, ec],
            p,
        })
    }

    fn coeffs(&self, s: &AnisoState) -> Result<[Coeffs; 4]> {
        if s.grid() != self.grid() {
            return contract("state grid differs from solver grid");
        }
        Ok([&s.u1, &s.u2, &s.u3, &s.c].map(|f| self.ops.forward_dealiased(f.values())))
    }

    fn etd(&self, dt: f64) -> [EtdWeights; 2] {
        [
            self.ops.etd(self.params.viscosity(), dt),
            self.ops.etd(self.params.aniso_diffusivity(), dt),
        ]
    }

    /// Full tendencies at the state.
    pub fn tendency(&self, state: &AnisoState, forcing: &dyn Forcing) -> Result<AnisoTendency> {
        let u = self.coeffs(state)?;
        let ex = self.explicit_unprojected(&u, state.t, forcing)?;
        let ops = &self.ops;
        let nu = self.params.viscosity();
        let kc = self.params.aniso_diffusivity();
        let g = ops.grid;
        let build = |i: usize, w: [f64; 3], p: Parity| {
            let c: Coeffs = (0..u[i].len())
                .map(|j| {
                    let k = ops.k[j];
                    ex[i][j] - u[i][j] * (w[0] * k[0] * k[0] + w[1] * k[1] * k[1] + w[2] * k[2] * k[2])
                })
                .collect();
            Field::from_values(g, ops.inverse(&c), p).expect("grid-sized")
        };
        Ok(AnisoTendency {
            f1: build(0, nu, Parity::Even),
            f2: build(1, nu, Parity::Even),
            f3: build(2, nu, Parity::Odd),
            fc: build(3, kc, Parity::Odd),
        })
    }

    fn explicit_unprojected(&self, u: &[Coeffs; 4], t: f64, forcing: &dyn Forcing) -> Result<[Coeffs; 4]> {
        // Recover F = G + weighted grad p from the projected tendency.
        let ex = self.explicit(u, t, forcing)?;
        let inv_e2 = 1.0 / (self.params.eps * self.params.eps);
        let [mut e1, mut e2, mut e3, ec] = ex.e;
        for j in 0..e1.len() {
            let k = self.ops.k[j];
            let gp = I * ex.p[j];
            e1[j] += gp * k[0];
            e2[j] += gp * k[1];
            e3[j] += gp * k[2] * inv_e2;
        }
        Ok([e1, e2, e3, ec])
    }

    /// One exponential time-differencing Runge-Kutta step (second order,
    /// diffusion integrated exactly).
    pub fn step(&self, state: &AnisoState, forcing: &dyn Forcing, dt: f64) -> Result<AnisoState> {
        let mut cache = None;
        self.step_cached(state, forcing, dt, &mut cache)
    }

    /// Like [`AnisoSolver::step`], reusing the explicit tendency of the
    /// incoming state when `cache` holds it and leaving the one of the new
    /// state behind.
    pub fn step_cached(
        &self,
        state: &AnisoState,
        forcing: &dyn Forcing,
        dt: f64,
        cache: &mut Option<AnisoCache>,
    ) -> Result<AnisoState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return config(format!("time step must be positive, got {dt}"));
        }
        let ops = &self.ops;
        let u = self.coeffs(state)?;
        let t0 = state.t;
        let ex0 = match cache.take() {
            Some(c) if c.t == t0 => c,
            _ => self.explicit(&u, t0, forcing)?,
        };
        let [wv, wc] = self.etd(dt);
        let w = |i: usize| if i == 3 { &wc } else { &wv };
        let stage: [Coeffs; 4] = [0, 1, 2, 3].map(|i| {
            let w = w(i);
            (0..u[i].len())
                .into_par_iter()
                .map(|j| w.e[j] * u[i][j] + dt * w.phi1[j] * ex0.e[i][j])
                .collect()
        });
        let ex1 = self.explicit(&stage, t0 + dt, forcing)?;
        let next: [Coeffs; 4] = [0, 1, 2, 3].map(|i| {
            let w = w(i);
            (0..u[i].len())
                .into_par_iter()
                .map(|j| stage[i][j] + dt * w.phi2[j] * (ex1.e[i][j] - ex0.e[i][j]))
                .collect()
        });
        let t1 = t0 + dt;
        let (u1, d1) = finish(ops, &next[0], Parity::Even, t1, "u1")?;
        let (u2, d2) = finish(ops, &next[1], Parity::Even, t1, "u2")?;
        let (u3, d3) = finish(ops, &next[2], Parity::Odd, t1, "u3")?;
        let (c, dc) = finish(ops, &next[3], Parity::Odd, t1, "c")?;
        let nc = [&u1, &u2, &u3, &c].map(|f| ops.forward_dealiased(f.values()));
        let ex2 = self.explicit(&nc, t1, forcing)?;
        let (p, dp) = finish(ops, &ex2.p, Parity::Even, t1, "p")?;
        self.drift.set([d1, d2, d3, dc, dp].into_iter().fold(0.0, f64::max));
        *cache = Some(ex2);
        Ok(AnisoState {
            u1,
            u2,
            u3,
            c,
            p,
            t: t1,
        })
    }

    /// Pressure balancing the tendency at the state.
    pub fn pressure(&self, state: &AnisoState, forcing: &dyn Forcing) -> Result<Field> {
        let u = self.coeffs(state)?;
        let ex = self.explicit(&u, state.t, forcing)?;
        finish(&self.ops, &ex.p, Parity::Even, state.t, "p").map(|(p, _)| p)
    }
}

/// Pointwise work of the Coriolis terms against the velocity, weighted as
/// in the energy (`eps^2` on the vertical component).
pub fn coriolis_work(u1: &Field, u2: &Field, u3: &Field, params: &PhysicalParams) -> Field {
    let c = params.coriolis();
    let e = params.eps;
    let g = *u1.grid();
    let vals = (0..g.len())
        .map(|i| {
            let (a, b, w) = (u1.values()[i], u2.values()[i], u3.values()[i]);
            (c.gamma * b - e * c.beta * w) * a
                + (-c.gamma * a + e * c.alpha * w) * b
                + e * e * ((c.beta * a - c.alpha * b) / e) * w
        })
        .collect();
    Field::from_values(g, vals, Parity::None).expect("grid-sized")
}

#[cfg(test)]
mod tests;
