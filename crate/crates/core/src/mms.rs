//! Manufactured solutions for both solvers.
//!
//! The exact velocity comes from a separable stream function
//! `psi = T(t) G(x1) Q(x2) H(z)` with `u1 = d3 psi`, `u3 = -d1 psi`, plus a
//! horizontal `u2 = S(t) W(x1) E(z)`. It is divergence-free, carries the
//! declared z-parities and has zero vertical mean divergence, so it is an
//! admissible state for the anisotropic and the hydrostatic system alike.
//! The forcing is the residual of the equations at the exact solution,
//! evaluated from closed-form derivatives.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::aniso::{AnisoSolver, AnisoState};
use crate::error::{config, Result};
use crate::fields::{Field, Parity, SpectralGrid};
use crate::forcing::{Forcing, ForcingTerms};
use crate::hydro::{HydroOptions, HydroSolver, HydroState, SurfaceField};
use crate::model::PhysicalParams;

const ORDER: usize = 6;

/// Value and derivatives 0..=5 of a function of one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Jet([f64; ORDER]);

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Jet {
    fn constant(v: f64) -> Self {
        let mut j = [0.0; ORDER];
        j[0] = v;
        Jet(j)
    }

    /// `sin(k x + phase)`.
    fn sin(k: f64, phase: f64, x: f64) -> Self {
        let mut j = [0.0; ORDER];
        for (n, v) in j.iter_mut().enumerate() {
            *v = k.powi(n as i32) * (k * x + phase + n as f64 * PI / 2.0).sin();
        }
        Jet(j)
    }

    fn cos(k: f64, x: f64) -> Self {
        Self::sin(k, PI / 2.0, x)
    }

    fn add(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|n| self.0[n] + o.0[n]))
    }

    fn scale(self, s: f64) -> Jet {
        Jet(self.0.map(|v| v * s))
    }

    fn mul(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|n| {
            (0..=n).map(|j| binom(n, j) * self.0[j] * o.0[n - j]).sum()
        }))
    }

    /// `exp(self)`, from `h' = g' h`.
    fn exp(self) -> Jet {
        let mut h = [0.0; ORDER];
        h[0] = self.0[0].exp();
        for n in 1..ORDER {
            h[n] = (0..n).map(|j| binom(n - 1, j) * self.0[j + 1] * h[n - 1 - j]).sum();
        }
        Jet(h)
    }

    /// Derivative as a jet (the top entry is lost).
    fn shift(self) -> Jet {
        Jet(std::array::from_fn(|n| {
            if n + 1 < ORDER {
                self.0[n + 1]
            } else {
                f64::NAN
            }
        }))
    }
}

/// Amplitude and time derivative of a time factor.
fn time_factor(amp: f64, omega: f64, phase: f64, t: f64) -> (f64, f64) {
    (
        amp * (1.0 + 0.5 * (omega * t + phase).sin()),
        amp * 0.5 * omega * (omega * t + phase).cos(),
    )
}

/// Separable term `time(t) * f1(x1) f2(x2) f3(x3)`.
struct Separable {
    amp: (f64, f64),
    f: [Jet; 3],
}

impl Separable {
    fn d(&self, o: [usize; 3]) -> f64 {
        self.amp.0 * self.f[0].0[o[0]] * self.f[1].0[o[1]] * self.f[2].0[o[2]]
    }

    fn value(&self) -> f64 {
        self.d([0, 0, 0])
    }

    fn grad(&self) -> [f64; 3] {
        [self.d([1, 0, 0]), self.d([0, 1, 0]), self.d([0, 0, 1])]
    }

    fn laplacian(&self, w: [f64; 3]) -> f64 {
        w[0] * self.d([2, 0, 0]) + w[1] * self.d([0, 2, 0]) + w[2] * self.d([0, 0, 2])
    }

    fn dt(&self) -> f64 {
        self.amp.1 * self.f[0].0[0] * self.f[1].0[0] * self.f[2].0[0]
    }
}

/// Which system the forcing closes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MmsSystem {
    Aniso,
    /// Hydrostatic limit with the given downwind regularization.
    Hydro {
        mu: f64,
    },
}

/// Exact solution of the forced system.
///
/// `sharpness = 0` gives trigonometric polynomials that a 16-point grid
/// resolves exactly; positive values wrap the profiles in exponentials,
/// making the solution smooth but not band-limited.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub params: PhysicalParams,
    pub system: MmsSystem,
    pub sharpness: f64,
    pub amplitude: f64,
}

/// Exact point values and their tendencies.
struct Point {
    u: [Separable; 3],
    c: Separable,
}

impl Manufactured {
    pub fn new(params: PhysicalParams, system: MmsSystem, sharpness: f64) -> Result<Self> {
        params.validate()?;
        if let MmsSystem::Hydro { mu } = system {
            HydroOptions { mu }.validate()?;
        }
        if !(sharpness.is_finite() && sharpness >= 0.0) {
            return config(format!("sharpness must be nonnegative, got {sharpness}"));
        }
        Ok(Self {
            params,
            system,
            sharpness,
            amplitude: 0.5,
        })
    }

    fn point(&self, t: f64, x: [f64; 3]) -> Point {
        let b = self.sharpness;
        let tau = 2.0 * PI;
        let kz = PI / self.params.a;
        let wrap = |j: Jet, arg: Jet| j.mul(arg.scale(b).exp());

        let g = wrap(Jet::cos(tau, x[0]), Jet::sin(tau, 0.0, x[0]));
        let q = Jet::constant(1.0).add(wrap(Jet::sin(tau, 0.0, x[1]), Jet::cos(tau, x[1])).scale(0.5));
        let h = wrap(Jet::sin(kz, 0.0, x[2]), Jet::cos(kz, x[2]));
        let w = wrap(Jet::sin(tau, 0.0, x[0]), Jet::cos(tau, x[0]));
        let e = wrap(Jet::cos(kz, x[2]), Jet::cos(kz, x[2]));
        let ca = wrap(Jet::cos(tau, x[0]), Jet::sin(tau, 0.0, x[0]));
        let cb = Jet::sin(tau, 0.3, x[1]);
        let cz = wrap(Jet::sin(kz, 0.0, x[2]), Jet::cos(kz, x[2]));

        let amp = self.amplitude;
        let tp = time_factor(amp, 2.0, 0.0, t);
        let ts = time_factor(amp, 1.0, 0.5, t);
        let tc = time_factor(1.0, 3.0, 1.0, t);
        let neg = (-tp.0, -tp.1);
        Point {
            u: [
                Separable {
                    amp: tp,
                    f: [g, q, h.shift()],
                },
                Separable {
                    amp: ts,
                    f: [w, Jet::constant(1.0), e],
                },
                Separable {
                    amp: neg,
                    f: [g.shift(), q, h],
                },
            ],
            c: Separable {
                amp: tc,
                f: [ca, cb, cz],
            },
        }
    }

    /// Exact `(u1, u2, u3, c)` on the grid at time `t`.
    pub fn exact(&self, grid: &SpectralGrid, t: f64) -> [Field; 4] {
        let parity = [Parity::Even, Parity::Even, Parity::Odd, Parity::Odd];
        std::array::from_fn(|i| {
            Field::from_fn(*grid, parity[i], |x| {
                let p = self.point(t, x);
                if i < 3 {
                    p.u[i].value()
                } else {
                    p.c.value()
                }
            })
        })
    }

    /// Exact `d/dt (u1, u2, u3, c)` on the grid.
    pub fn exact_rate(&self, grid: &SpectralGrid, t: f64) -> [Field; 4] {
        let parity = [Parity::Even, Parity::Even, Parity::Odd, Parity::Odd];
        std::array::from_fn(|i| {
            Field::from_fn(*grid, parity[i], |x| {
                let p = self.point(t, x);
                if i < 3 {
                    p.u[i].dt()
                } else {
                    p.c.dt()
                }
            })
        })
    }

    /// Forcing residual `[f1, f2, f3, fc]` at one point.
    fn residual(&self, t: f64, x: [f64; 3]) -> [f64; 4] {
        let p = self.point(t, x);
        let pr = &self.params;
        let cor = pr.coriolis();
        let nu = pr.viscosity();
        let vel = [p.u[0].value(), p.u[1].value(), p.u[2].value()];
        let adv = |s: &Separable| {
            let g = s.grad();
            vel[0] * g[0] + vel[1] * g[1] + vel[2] * g[2]
        };
        let kc = match self.system {
            MmsSystem::Aniso => pr.aniso_diffusivity(),
            MmsSystem::Hydro { mu } => [mu, pr.k2, pr.k3],
        };
        // On parity-consistent states only the gamma Coriolis terms act.
        let f1 = p.u[0].dt() + adv(&p.u[0]) - p.u[0].laplacian(nu) - cor.gamma * vel[1];
        let f2 = p.u[1].dt() + adv(&p.u[1]) - p.u[1].laplacian(nu) + cor.gamma * vel[0];
        let f3 = match self.system {
            MmsSystem::Aniso => p.u[2].dt() + adv(&p.u[2]) - p.u[2].laplacian(nu),
            MmsSystem::Hydro { .. } => 0.0,
        };
        let fc = p.c.dt() + adv(&p.c) - vel[2] / pr.a - p.c.laplacian(kc);
        [f1, f2, f3, fc]
    }

    pub fn forcing(&self, grid: &SpectralGrid) -> MmsForcing {
        MmsForcing {
            man: *self,
            grid: *grid,
        }
    }

    pub fn aniso_state(&self, grid: &SpectralGrid, t: f64) -> AnisoState {
        let [u1, u2, u3, c] = self.exact(grid, t);
        AnisoState {
            u1,
            u2,
            u3,
            c,
            p: Field::zeros(*grid, Parity::Even),
            t,
        }
    }

    pub fn hydro_state(&self, grid: &SpectralGrid, t: f64) -> HydroState {
        let [u1, u2, _, c] = self.exact(grid, t);
        HydroState {
            u1,
            u2,
            c,
            p_s: SurfaceField::zeros(grid),
            t,
        }
    }

    /// Runs the matching solver from the exact initial state to `t_end` and
    /// returns the L2 error of `(u, c)` against the exact solution.
    pub fn run_error(&self, grid: &SpectralGrid, dt: f64, t_end: f64) -> Result<f64> {
        let steps = (t_end / dt).round() as usize;
        if steps == 0 || ((steps as f64) * dt - t_end).abs() > 1e-9 * t_end {
            return config(format!("t_end {t_end} is not a multiple of dt {dt}"));
        }
        let forcing = self.forcing(grid);
        let (fields, t) = match self.system {
            MmsSystem::Aniso => {
                let solver = AnisoSolver::new(*grid, self.params)?;
                let mut s = self.aniso_state(grid, 0.0);
                let mut cache = None;
                for _ in 0..steps {
                    s = solver.step_cached(&s, &forcing, dt, &mut cache)?;
                }
                ([s.u1, s.u2, s.u3, s.c], s.t)
            }
            MmsSystem::Hydro { mu } => {
                let solver = HydroSolver::new(*grid, self.params, HydroOptions { mu })?;
                let mut s = self.hydro_state(grid, 0.0);
                let mut cache = None;
                for _ in 0..steps {
                    s = solver.step_cached(&s, &forcing, dt, &mut cache)?;
                }
                let u3 = s.u3()?;
                ([s.u1, s.u2, u3, s.c], s.t)
            }
        };
        let exact = self.exact(grid, t);
        let err: f64 = fields.iter().zip(&exact).map(|(a, b)| a.sub(b).l2_norm().powi(2)).sum();
        Ok(err.sqrt())
    }
}

/// Time-dependent forcing that makes [`Manufactured`] an exact solution.
pub struct MmsForcing {
    man: Manufactured,
    grid: SpectralGrid,
}

impl Forcing for MmsForcing {
    fn at(&self, t: f64) -> ForcingTerms {
        let parity = [Parity::Even, Parity::Even, Parity::Odd, Parity::Odd];
        let [f1, f2, f3, fc] =
            std::array::from_fn(|i| Field::from_fn(self.grid, parity[i], |x| self.man.residual(t, x)[i]));
        ForcingTerms {
            momentum: Some([f1, f2, f3]),
            tracer: Some(fc),
        }
    }
}

/// Errors over a sequence of refinements and the observed orders between
/// consecutive levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for time steps; plain
    /// error ratios for grid refinements.
    pub rates: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn min_rate(&self) -> f64 {
        self.rates.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Temporal order from runs at the given time steps on one grid.
pub fn temporal_study(man: &Manufactured, grid: &SpectralGrid, dts: &[f64], t_end: f64) -> Result<ConvergenceStudy> {
    if dts.len() < 2 {
        return config("temporal study needs at least two time steps");
    }
    let errors = dts
        .iter()
        .map(|&dt| man.run_error(grid, dt, t_end))
        .collect::<Result<Vec<_>>>()?;
    let rates = (1..dts.len())
        .map(|i| (errors[i - 1] / errors[i]).ln() / (dts[i - 1] / dts[i]).ln())
        .collect();
    Ok(ConvergenceStudy {
        levels: dts.to_vec(),
        errors,
        rates,
    })
}

/// Error drop between cubic grids of the given sizes at a fixed time step.
pub fn spatial_study(man: &Manufactured, sizes: &[usize], dt: f64, t_end: f64) -> Result<ConvergenceStudy> {
    if sizes.len() < 2 {
        return config("spatial study needs at least two grids");
    }
    let errors = sizes
        .iter()
        .map(|&n| {
            let g = SpectralGrid::cubic(n, man.params.a)?;
            man.run_error(&g, dt, t_end)
        })
        .collect::<Result<Vec<_>>>()?;
    let rates = (1..sizes.len()).map(|i| errors[i - 1] / errors[i]).collect();
    Ok(ConvergenceStudy {
        levels: sizes.iter().map(|&n| n as f64).collect(),
        errors,
        rates,
    })
}

#[cfg(test)]
mod tests;
