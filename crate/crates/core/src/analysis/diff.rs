//! Norms of the gap between anisotropic and hydrostatic solutions.

use serde::{Deserialize, Serialize};

use crate::aniso::AnisoState;
use crate::error::{contract, Result};
use crate::fields::{Field, Spectrum};
use crate::hydro::HydroState;

/// Norms of `U_h = u_h^eps - u_h`, `U_3 = u_3^eps - u_3` and `C = c^eps - c`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiffRecord {
    pub eps: f64,
    pub sup_uh_l2: f64,
    pub sup_uh_h1: f64,
    pub sup_uh_h2: f64,
    /// `sup ||eps U_3||_{H^2}`.
    pub sup_eps_u3_h2: f64,
    /// `(int ||grad U_h||_{H^2}^2 dt)^{1/2}`.
    pub int_grad_uh_h2: f64,
    pub sup_c_h1: f64,
    /// `(int ||(d2 C, d3 C)||_{H^1}^2 dt)^{1/2}`.
    pub int_gradd_c_h1: f64,
    pub samples: usize,
    pub t_end: f64,
}

pub const DIFF_KEYS: [&str; 7] = [
    "sup_uh_l2",
    "sup_uh_h1",
    "sup_uh_h2",
    "sup_eps_u3_h2",
    "int_grad_uh_h2",
    "sup_c_h1",
    "int_gradd_c_h1",
];

impl DiffRecord {
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "sup_uh_l2" => self.sup_uh_l2,
            "sup_uh_h1" => self.sup_uh_h1,
            "sup_uh_h2" => self.sup_uh_h2,
            "sup_eps_u3_h2" => self.sup_eps_u3_h2,
            "int_grad_uh_h2" => self.int_grad_uh_h2,
            "sup_c_h1" => self.sup_c_h1,
            "int_gradd_c_h1" => self.int_gradd_c_h1,
            _ => return None,
        })
    }
}

fn sob(s: &Spectrum, order: i32, extra: impl Fn([f64; 3]) -> f64) -> f64 {
    s.weighted_sq(|k| (1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).powi(order) * extra(k))
}

/// Instantaneous squared norms of one pair of states.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiffSample {
    pub t: f64,
    pub uh_l2: f64,
    pub uh_h1: f64,
    pub uh_h2: f64,
    pub eps_u3_h2: f64,
    pub grad_uh_h2_sq: f64,
    pub c_h1: f64,
    pub gradd_c_h1_sq: f64,
}

pub fn diff_sample(a: &AnisoState, h: &HydroState, hydro_u3: &Field, eps: f64) -> Result<DiffSample> {
    if (a.t - h.t).abs() > 1e-9 * a.t.abs().max(1.0) {
        return contract(format!("sample times differ: {} vs {}", a.t, h.t));
    }
    if a.grid() != h.grid() {
        return contract("trajectories live on different grids");
    }
    let u1 = a.u1.sub(&h.u1).spectrum();
    let u2 = a.u2.sub(&h.u2).spectrum();
    let u3 = a.u3.sub(hydro_u3).spectrum();
    let c = a.c.sub(&h.c).spectrum();
    let both = |o: i32, w: &dyn Fn([f64; 3]) -> f64| sob(&u1, o, w) + sob(&u2, o, w);
    let one = |_: [f64; 3]| 1.0;
    let kk = |k: [f64; 3]| k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    Ok(DiffSample {
        t: a.t,
        uh_l2: both(0, &one).sqrt(),
        uh_h1: both(1, &one).sqrt(),
        uh_h2: both(2, &one).sqrt(),
        eps_u3_h2: eps * sob(&u3, 2, one).sqrt(),
        grad_uh_h2_sq: both(2, &kk),
        c_h1: sob(&c, 1, one).sqrt(),
        gradd_c_h1_sq: sob(&c, 1, |k| k[1] * k[1] + k[2] * k[2]),
    })
}

/// Streaming accumulation of a [`DiffRecord`].
pub struct DiffMonitor {
    rec: DiffRecord,
    prev: Option<DiffSample>,
    int: [f64; 2],
}

impl DiffMonitor {
    pub fn new(eps: f64) -> Self {
        Self {
            rec: DiffRecord {
                eps,
                ..DiffRecord::default()
            },
            prev: None,
            int: [0.0; 2],
        }
    }

    pub fn push_sample(&mut self, s: DiffSample) -> Result<()> {
        if let Some(p) = &self.prev {
            let h = s.t - p.t;
            if !(h > 0.0) {
                return contract("samples must advance in time");
            }
            self.int[0] += 0.5 * h * (p.grad_uh_h2_sq + s.grad_uh_h2_sq);
            self.int[1] += 0.5 * h * (p.gradd_c_h1_sq + s.gradd_c_h1_sq);
        }
        let r = &mut self.rec;
        r.sup_uh_l2 = r.sup_uh_l2.max(s.uh_l2);
        r.sup_uh_h1 = r.sup_uh_h1.max(s.uh_h1);
        r.sup_uh_h2 = r.sup_uh_h2.max(s.uh_h2);
        r.sup_eps_u3_h2 = r.sup_eps_u3_h2.max(s.eps_u3_h2);
        r.sup_c_h1 = r.sup_c_h1.max(s.c_h1);
        r.samples += 1;
        r.t_end = s.t;
        self.prev = Some(s);
        Ok(())
    }

    pub fn push(&mut self, a: &AnisoState, h: &HydroState) -> Result<()> {
        let u3 = h.u3()?;
        let s = diff_sample(a, h, &u3, self.rec.eps)?;
        self.push_sample(s)
    }

    pub fn finish(&self) -> DiffRecord {
        let mut r = self.rec.clone();
        r.int_grad_uh_h2 = self.int[0].sqrt();
        r.int_gradd_c_h1 = self.int[1].sqrt();
        r
    }
}

/// Difference norms over two stored trajectories sampled at the same times.
pub fn diff_norms(aniso: &[AnisoState], hydro: &[HydroState], eps: f64) -> Result<DiffRecord> {
    if aniso.len() != hydro.len() {
        return contract(format!("trajectory lengths differ: {} vs {}", aniso.len(), hydro.len()));
    }
    let mut m = DiffMonitor::new(eps);
    for (a, h) in aniso.iter().zip(hydro) {
        m.push(a, h)?;
    }
    Ok(m.finish())
}
