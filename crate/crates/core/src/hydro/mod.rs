//! Hydrostatic limit: horizontal momentum with a barotropic surface
//! pressure, diagnostic vertical velocity, and the shifted tracer equation.

use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{config, contract, Error, Result};
use crate::fields::{Field, Parity, SpectralGrid};
use crate::forcing::Forcing;
use crate::model::PhysicalParams;
use crate::ops::{all_finite, axpy, Coeffs, EtdWeights, SpectralOps, I};

/// A function of the horizontal coordinates only, stored n1 x n2 (x2 fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceField {
    pub n1: usize,
    pub n2: usize,
    pub values: Vec<f64>,
}

impl SurfaceField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            n1: grid.n1,
            n2: grid.n2,
            values: vec![0.0; grid.n1 * grid.n2],
        }
    }

    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.n2 + i2]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Extends to a z-independent field on the full grid.
    pub fn extend(&self, grid: &SpectralGrid) -> Field {
        let s = self.clone();
        let g = *grid;
        let vals = (0..g.len())
            .map(|idx| {
                let (i1, i2, _) = g.unravel(idx);
                s.at(i1, i2)
            })
            .collect();
        Field::from_values(g, vals, Parity::Even).expect("grid-sized")
    }

    fn from_coeffs(ops: &SpectralOps, p: &[Complex64]) -> Self {
        let g = ops.grid;
        let full = ops.inverse(p);
        let mut values = Vec::with_capacity(g.n1 * g.n2);
        for i1 in 0..g.n1 {
            for i2 in 0..g.n2 {
                values.push(full[g.index(i1, i2, 0)]);
            }
        }
        Self {
            n1: g.n1,
            n2: g.n2,
            values,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HydroOptions {
    /// Weight of the optional downwind regularization `mu d11 c`.
    pub mu: f64,
}

impl HydroOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return config(format!("mu must be nonnegative, got {}", self.mu));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HydroState {
    pub u1: Field,
    pub u2: Field,
    pub c: Field,
    pub p_s: SurfaceField,
    pub t: f64,
}

impl HydroState {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        Self {
            u1: Field::zeros(*grid, Parity::Even),
            u2: Field::zeros(*grid, Parity::Even),
            c: Field::zeros(*grid, Parity::Odd),
            p_s: SurfaceField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.u1.grid()
    }

    /// The diagnostic vertical velocity.
    pub fn u3(&self) -> Result<Field> {
        diagnose_u3(&self.u1, &self.u2)
    }

    /// `||div_h mean_z u_h|| / ||grad u_h||` (0 for a constant flow).
    pub fn barotropic_ratio(&self) -> f64 {
        let ops = SpectralOps::new(*self.grid());
        let (res, scale) = barotropic_residual(&ops, &ops.forward(self.u1.values()), &ops.forward(self.u2.values()));
        if scale == 0.0 {
            0.0
        } else {
            res / scale
        }
    }
}

/// Full tendencies (diffusion included, surface pressure excluded).
#[derive(Clone, Debug)]
pub struct HydroTendency {
    pub f1: Field,
    pub f2: Field,
    pub fc: Field,
}

const BAROTROPIC_RTOL: f64 = 1e-10;
const BAROTROPIC_ATOL: f64 = 1e-13;

/// Divergence of the vertically averaged horizontal velocity and the
/// horizontal gradient scale it is measured against.
fn barotropic_residual(ops: &SpectralOps, u1: &[Complex64], u2: &[Complex64]) -> (f64, f64) {
    let v = ops.grid.volume();
    let mut res = 0.0;
    let mut scale = 0.0;
    for idx in 0..u1.len() {
        let k = ops.k[idx];
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        scale += kk * (u1[idx].norm_sqr() + u2[idx].norm_sqr());
        if ops.barotropic[idx] {
            res += (k[0] * u1[idx] + k[1] * u2[idx]).norm_sqr();
        }
    }
    ((res * v).sqrt(), (scale * v).sqrt())
}

/// `u3 = -int_{-a}^{z} div_h u_h`, computed as the spectral antiderivative
/// with the k3 = 0 mode fixed so that u3(-a) = 0.
pub(crate) fn diagnose_u3_spec(ops: &SpectralOps, u1: &[Complex64], u2: &[Complex64]) -> Result<Coeffs> {
    let (res, scale) = barotropic_residual(ops, u1, u2);
    if res > BAROTROPIC_RTOL * scale + BAROTROPIC_ATOL {
        return contract(format!(
            "vertically averaged horizontal divergence is {res:.3e} (gradient scale {scale:.3e}); \
             the diagnosed vertical velocity would not be periodic"
        ));
    }
    let g = ops.grid;
    let n3 = g.n3;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    out.par_chunks_mut(n3).enumerate().for_each(|(line, col)| {
        let base = line * n3;
        let mut sum = Complex64::new(0.0, 0.0);
        for i3 in 1..n3 {
            let idx = base + i3;
            let k = ops.k[idx];
            if k[2] == 0.0 {
                continue;
            }
            let div = I * (k[0] * u1[idx] + k[1] * u2[idx]);
            // u3 = -antiderivative
            let v = -div / (I * k[2]);
            col[i3] = v;
            sum += v;
        }
        col[0] = -sum;
    });
    Ok(out)
}

pub fn diagnose_u3(u1: &Field, u2: &Field) -> Result<Field> {
    let ops = SpectralOps::new(*u1.grid());
    let s = diagnose_u3_spec(&ops, &ops.forward(u1.values()), &ops.forward(u2.values()))?;
    Field::from_values(ops.grid, ops.inverse(&s), Parity::Odd)
}

/// Removes the barotropic gradient part in place; returns p_s coefficients.
pub(crate) fn project_barotropic_spec(ops: &SpectralOps, f1: &mut [Complex64], f2: &mut [Complex64]) -> Coeffs {
    let mut p = vec![Complex64::new(0.0, 0.0); f1.len()];
    for idx in 0..f1.len() {
        if !ops.barotropic[idx] {
            continue;
        }
        let k = ops.k[idx];
        let d = k[0] * k[0] + k[1] * k[1];
        if d == 0.0 {
            continue;
        }
        let ph = -I * (k[0] * f1[idx] + k[1] * f2[idx]) / d;
        f1[idx] -= I * k[0] * ph;
        f2[idx] -= I * k[1] * ph;
        p[idx] = ph;
    }
    p
}

/// Splits off the gradient of a surface pressure so that the vertical
/// average of the result is horizontally divergence-free.
pub fn project_barotropic(f1: &Field, f2: &Field) -> (Field, Field, SurfaceField) {
    let ops = SpectralOps::new(*f1.grid());
    let mut a = ops.forward(f1.values());
    let mut b = ops.forward(f2.values());
    let p = project_barotropic_spec(&ops, &mut a, &mut b);
    let g1 = Field::from_values(ops.grid, ops.inverse(&a), f1.parity()).expect("grid-sized");
    let g2 = Field::from_values(ops.grid, ops.inverse(&b), f2.parity()).expect("grid-sized");
    (g1, g2, SurfaceField::from_coeffs(&ops, &p))
}

/// Explicit tendency at a state, reusable as the first stage of the next step.
pub struct HydroCache {
    t: f64,
    e1: Coeffs,
    e2: Coeffs,
    ec: Coeffs,
    ps: Coeffs,
}

pub struct HydroSolver {
    params: PhysicalParams,
    opts: HydroOptions,
    ops: SpectralOps,
    drift: DriftGauge,
}

impl HydroSolver {
    pub fn new(grid: SpectralGrid, params: PhysicalParams, opts: HydroOptions) -> Result<Self> {
        params.validate()?;
        opts.validate()?;
        if (grid.a - params.a).abs() > 1e-14 * params.a {
            return config(format!(
                "grid half-height {} differs from parameter a = {}",
                grid.a, params.a
            ));
        }
        Ok(Self {
            params,
            opts,
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

    pub fn options(&self) -> &HydroOptions {
        &self.opts
    }

    /// Largest relative parity drift of the last step, measured before the
    /// fields were re-symmetrized.
    pub fn last_parity_drift(&self) -> f64 {
        self.drift.get()
    }

    fn tracer_diffusivity(&self) -> [f64; 3] {
        [self.opts.mu, self.params.k2, self.params.k3]
    }

    fn explicit(&self, u1: &Coeffs, u2: &Coeffs, c: &Coeffs, t: f64, forcing: &dyn Forcing) -> Result<HydroCache> {
        let ops = &self.ops;
        let u3 = diagnose_u3_spec(ops, u1, u2)?;
        let r1 = ops.inverse(u1);
        let r2 = ops.inverse(u2);
        let r3 = ops.inverse(&u3);
        let g1 = ops.grad_real(u1);
        let g2 = ops.grad_real(u2);
        let gc = ops.grad_real(c);
        let adv = |g: &[Vec<f64>; 3]| -> Vec<f64> {
            (0..r1.len())
                .into_par_iter()
                .map(|i| r1[i] * g[0][i] + r2[i] * g[1][i] + r3[i] * g[2][i])
                .collect()
        };
        let n1 = ops.forward_dealiased(&adv(&g1));
        let n2 = ops.forward_dealiased(&adv(&g2));
        let nc = ops.forward_dealiased(&adv(&gc));
        if !(all_finite(&r1) && all_finite(&r2) && all_finite(&r3)) {
            return Err(Error::BlowUp {
                time: t,
                what: "non-finite velocity".into(),
            });
        }
        let gamma = self.params.coriolis().gamma;
        let inv_a = 1.0 / self.params.a;
        let mut e1: Coeffs = (0..n1.len()).map(|i| -n1[i] + gamma * u2[i]).collect();
        let mut e2: Coeffs = (0..n2.len()).map(|i| -n2[i] - gamma * u1[i]).collect();
        let mut ec: Coeffs = (0..nc.len()).map(|i| -nc[i] + inv_a * u3[i]).collect();
        let terms = forcing.at(t);
        if let Some(m) = &terms.momentum {
            axpy(&mut e1, 1.0, &ops.forward_dealiased(m[0].values()));
            axpy(&mut e2, 1.0, &ops.forward_dealiased(m[1].values()));
        }
        if let Some(s) = &terms.tracer {
            axpy(&mut ec, 1.0, &ops.forward_dealiased(s.values()));
        }
        let ps = project_barotropic_spec(ops, &mut e1, &mut e2);
        Ok(HydroCache { t, e1, e2, ec, ps })
    }

    fn state_coeffs(&self, s: &HydroState) -> Result<[Coeffs; 3]> {
        if s.grid() != self.grid() {
            return contract("state grid differs from solver grid");
        }
        Ok([&s.u1, &s.u2, &s.c].map(|f| self.ops.forward_dealiased(f.values())))
    }

    /// Full tendencies at the state.
    pub fn tendency(&self, state: &HydroState, forcing: &dyn Forcing) -> Result<HydroTendency> {
        let [u1, u2, c] = self.state_coeffs(state)?;
        let ex = self.explicit(&u1, &u2, &c, state.t, forcing)?;
        let ops = &self.ops;
        let nu = self.params.viscosity();
        let kc = self.tracer_diffusivity();
        let lap = |x: &Coeffs, w: [f64; 3]| -> Coeffs {
            x.iter()
                .zip(&ops.k)
                .map(|(x, k)| -x * (w[0] * k[0] * k[0] + w[1] * k[1] * k[1] + w[2] * k[2] * k[2]))
                .collect()
        };
        let add = |a: &Coeffs, b: Coeffs| -> Coeffs { a.iter().zip(b).map(|(a, b)| a + b).collect() };
        let g = ops.grid;
        let mk = |c: Coeffs, p: Parity| Field::from_values(g, ops.inverse(&c), p).expect("grid-sized");
        Ok(HydroTendency {
            f1: mk(add(&ex.e1, lap(&u1, nu)), Parity::Even),
            f2: mk(add(&ex.e2, lap(&u2, nu)), Parity::Even),
            fc: mk(add(&ex.ec, lap(&c, kc)), Parity::Odd),
        })
    }

    /// One exponential time-differencing Runge-Kutta step of size `dt`.
    pub fn step(&self, state: &HydroState, forcing: &dyn Forcing, dt: f64) -> Result<HydroState> {
        let mut cache = None;
        self.step_cached(state, forcing, dt, &mut cache)
    }

    /// Like [`HydroSolver::step`], reusing the explicit tendency of the
    /// incoming state when `cache` holds it and leaving the one of the new
    /// state behind.
    pub fn step_cached(
        &self,
        state: &HydroState,
        forcing: &dyn Forcing,
        dt: f64,
        cache: &mut Option<HydroCache>,
    ) -> Result<HydroState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return config(format!("time step must be positive, got {dt}"));
        }
        let ops = &self.ops;
        let [u1, u2, c] = self.state_coeffs(state)?;
        let wv = ops.etd(self.params.viscosity(), dt);
        let wc = ops.etd(self.tracer_diffusivity(), dt);
        let t0 = state.t;
        let ex0 = match cache.take() {
            Some(c) if c.t == t0 => c,
            _ => self.explicit(&u1, &u2, &c, t0, forcing)?,
        };
        let stage = |x: &Coeffs, e: &Coeffs, w: &EtdWeights| -> Coeffs {
            (0..x.len())
                .into_par_iter()
                .map(|j| w.e[j] * x[j] + dt * w.phi1[j] * e[j])
                .collect()
        };
        let s1 = stage(&u1, &ex0.e1, &wv);
        let s2 = stage(&u2, &ex0.e2, &wv);
        let sc = stage(&c, &ex0.ec, &wc);
        let ex1 = self.explicit(&s1, &s2, &sc, t0 + dt, forcing)?;
        let correct = |a: &Coeffs, e0: &Coeffs, e1: &Coeffs, w: &EtdWeights| -> Coeffs {
            (0..a.len())
                .into_par_iter()
                .map(|j| a[j] + dt * w.phi2[j] * (e1[j] - e0[j]))
                .collect()
        };
        let n1 = correct(&s1, &ex0.e1, &ex1.e1, &wv);
        let n2 = correct(&s2, &ex0.e2, &ex1.e2, &wv);
        let nc = correct(&sc, &ex0.ec, &ex1.ec, &wc);
        let t1 = t0 + dt;
        let (u1f, d1) = finish(ops, &n1, Parity::Even, t1, "u1")?;
        let (u2f, d2) = finish(ops, &n2, Parity::Even, t1, "u2")?;
        let (cf, dc) = finish(ops, &nc, Parity::Odd, t1, "c")?;
        self.drift.set(d1.max(d2).max(dc));
        let next = [&u1f, &u2f, &cf].map(|f| ops.forward_dealiased(f.values()));
        let ex2 = self.explicit(&next[0], &next[1], &next[2], t1, forcing)?;
        let ps = SurfaceField::from_coeffs(ops, &ex2.ps);
        *cache = Some(ex2);
        Ok(HydroState {
            u1: u1f,
            u2: u2f,
            c: cf,
            p_s: ps,
            t: t1,
        })
    }

    /// Surface pressure balancing the tendency at the state.
    pub fn surface_pressure(&self, state: &HydroState, forcing: &dyn Forcing) -> Result<SurfaceField> {
        let [u1, u2, c] = self.state_coeffs(state)?;
        let ex = self.explicit(&u1, &u2, &c, state.t, forcing)?;
        Ok(SurfaceField::from_coeffs(&self.ops, &ex.ps))
    }
}

/// Back to real space, blow-up check, parity drift check and re-symmetrization.
/// Largest relative parity drift seen before re-symmetrization in the
/// latest step of a solver.
#[derive(Debug, Default)]
pub(crate) struct DriftGauge(AtomicU64);

impl DriftGauge {
    pub fn set(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed);
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }
}

/// Converts step output to a field, rejecting blow-up and parity drift
/// beyond tolerance; returns the symmetrized field and its relative drift.
pub(crate) fn finish(ops: &SpectralOps, c: &Coeffs, parity: Parity, t: f64, name: &str) -> Result<(Field, f64)> {
    let vals = ops.inverse(c);
    if !all_finite(&vals) {
        return Err(Error::BlowUp {
            time: t,
            what: format!("non-finite values in {name}"),
        });
    }
    let f = Field::from_values(ops.grid, vals, parity)?;
    let norm = f.l2_norm();
    let drift = f.parity_residual()?;
    if drift > PARITY_DRIFT_TOL * norm.max(1.0) {
        return Err(Error::Consistency(format!(
            "{name} parity drift {drift:.3e} exceeds tolerance at t = {t}"
        )));
    }
    Ok((f.symmetrize(), drift / norm.max(1.0)))
}

pub(crate) const PARITY_DRIFT_TOL: f64 = 1e-8;
