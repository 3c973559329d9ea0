use super::*;
use crate::fields::{derive, Axis};
use crate::forcing::{NoForcing, SteadySource};
use std::f64::consts::PI;

fn grid() -> SpectralGrid {
    SpectralGrid::new(16, 16, 16, 1.0).unwrap()
}

#[test]
fn zero_state_has_zero_tendency_and_stays_zero() {
    let g = grid();
    let solver = AnisoSolver::new(g, PhysicalParams::default()).unwrap();
    let s = AnisoState::zeros(&g);
    let t = solver.tendency(&s, &NoForcing).unwrap();
    for f in [&t.f1, &t.f2, &t.f3, &t.fc] {
        assert_eq!(f.max_abs(), 0.0);
    }
    let n = solver.step(&s, &NoForcing, 0.01).unwrap();
    assert_eq!(n.u1.max_abs() + n.u3.max_abs() + n.c.max_abs() + n.p.max_abs(), 0.0);
}

#[test]
fn pure_diffusion_tendency_of_tracer_mode() {
    let g = grid();
    let p = PhysicalParams {
        k2: 0.3,
        ..PhysicalParams::default()
    };
    let solver = AnisoSolver::new(g, p).unwrap();
    let mut s = AnisoState::zeros(&g);
    s.c = Field::from_fn(g, Parity::Odd, |x| (2.0 * PI * x[1]).sin() * (PI * x[2]).sin());
    let t = solver.tendency(&s, &NoForcing).unwrap();
    let expect = s.c.scale(-4.0 * PI * PI * 0.3 - PI * PI);
    assert!(t.fc.sub(&expect).max_abs() < 1e-10);
}

#[test]
fn diffusion_only_mode_decays_by_integrating_factor() {
    let g = grid();
    let p = PhysicalParams {
        f: 0.0,
        k2: 0.4,
        ..PhysicalParams::default()
    };
    let solver = AnisoSolver::new(g, p).unwrap();
    let mut s = AnisoState::zeros(&g);
    s.u1 = Field::from_fn(g, Parity::Even, |x| (2.0 * PI * x[1]).sin());
    s.c = Field::from_fn(g, Parity::Odd, |x| (2.0 * PI * x[1]).sin() * (PI * x[2]).sin());
    let (u0, c0) = (s.u1.clone(), s.c.clone());
    for _ in 0..10 {
        s = solver.step(&s, &NoForcing, 0.01).unwrap();
    }
    let eu = u0.scale((-4.0 * PI * PI * s.t).exp());
    let ec = c0.scale((-(4.0 * PI * PI * 0.4 + PI * PI) * s.t).exp());
    assert!(s.u1.sub(&eu).max_abs() < 1e-10);
    assert!(s.c.sub(&ec).max_abs() < 1e-10);
}

#[test]
fn weighted_gradient_is_annihilated() {
    let g = grid();
    let eps = 0.2;
    let gf = |x: [f64; 3]| (2.0 * PI * x[0]).cos() * (PI * x[2]).cos() + (4.0 * PI * x[1]).sin();
    let gfield = Field::from_fn(g, Parity::Even, gf);
    let f1 = derive(&gfield, Axis::X1, 1);
    let f2 = derive(&gfield, Axis::X2, 1);
    let f3 = derive(&gfield, Axis::X3, 1).scale(1.0 / (eps * eps));
    let (gv, p) = project_weighted(&f1, &f2, &f3, eps).unwrap();
    for f in &gv {
        assert!(f.max_abs() < 1e-11);
    }
    assert!(p.sub(&gfield).max_abs() < 1e-12);
}

#[test]
fn constant_field_passes_through() {
    let g = grid();
    let f = [1.5, -0.5, 2.0].map(|v| Field::constant(g, v));
    let (gv, p) = project_weighted(&f[0], &f[1], &f[2], 0.1).unwrap();
    for i in 0..3 {
        assert!(gv[i].sub(&f[i]).max_abs() < 1e-14);
    }
    assert!(p.max_abs() < 1e-14);
}

#[test]
fn single_mode_matches_weighted_projector() {
    let g = grid();
    let eps = 0.3;
    let k = [2.0 * PI, 4.0 * PI, 3.0 * PI];
    let amp = [1.0, -0.4, 0.7];
    let phase = |x: [f64; 3]| (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).cos();
    let f = amp.map(|a| Field::from_fn(g, Parity::None, move |x| a * phase(x)));
    let (gv, _) = project_weighted(&f[0], &f[1], &f[2], eps).unwrap();
    // G = (I - w k^T / (k.w)) F with w = (k1, k2, k3/eps^2)
    let w = [k[0], k[1], k[2] / (eps * eps)];
    let kw: f64 = (0..3).map(|i| k[i] * w[i]).sum();
    let kf: f64 = (0..3).map(|i| k[i] * amp[i]).sum();
    for i in 0..3 {
        let a = amp[i] - w[i] * kf / kw;
        let e = Field::from_fn(g, Parity::None, |x| a * phase(x));
        assert!(gv[i].sub(&e).max_abs() < 1e-12);
    }
}

#[test]
fn random_state_is_admissible_and_deterministic() {
    let g = grid();
    let a = init_random_state(&g, 11, 1.0, 4).unwrap();
    let b = init_random_state(&g, 11, 1.0, 4).unwrap();
    assert_eq!(a, b);
    assert!(a.divergence_ratio() < 1e-10);
    assert!(a.parity_defect() < 1e-10);
    assert!(a.u1.mean().abs() < 1e-14 && a.u2.mean().abs() < 1e-14);
    let z = init_random_state(&g, 11, 0.0, 4).unwrap();
    assert_eq!(z, AnisoState::zeros(&g));
    assert!(init_random_state(&g, 1, 1.0, 6).is_err());
}

#[test]
fn stepping_preserves_constraints() {
    let g = grid();
    let p = PhysicalParams::default().with_eps(0.2);
    let solver = AnisoSolver::new(g, p).unwrap();
    let mut s = init_random_state(&g, 5, 1.0, 4).unwrap();
    let src = SteadySource(Field::from_fn(g, Parity::Odd, |x| {
        (2.0 * PI * x[0]).cos() * (PI * x[2]).sin()
    }));
    let mut cache = None;
    for _ in 0..5 {
        s = solver.step_cached(&s, &src, 0.01, &mut cache).unwrap();
        assert!(s.divergence_ratio() < 1e-10);
        assert!(s.parity_defect() < 1e-10);
        assert!(s.p.mean().abs() < 1e-13);
    }
}

#[test]
fn cached_and_plain_steps_agree() {
    let g = grid();
    let solver = AnisoSolver::new(g, PhysicalParams::default().with_eps(0.2)).unwrap();
    let s0 = init_random_state(&g, 9, 1.0, 4).unwrap();
    let mut cache = None;
    let mut a = s0.clone();
    let mut b = s0;
    for _ in 0..3 {
        a = solver.step_cached(&a, &NoForcing, 0.01, &mut cache).unwrap();
        b = solver.step(&b, &NoForcing, 0.01).unwrap();
    }
    assert_eq!(a, b);
}

#[test]
fn coriolis_work_vanishes_pointwise() {
    let g = grid();
    let s = init_random_state(&g, 2, 1.0, 4).unwrap();
    let p = PhysicalParams::default().with_eps(0.05);
    let w = coriolis_work(&s.u1, &s.u2, &s.u3, &p);
    let scale = s.u1.max_abs().powi(2) * 10.0;
    assert!(w.max_abs() < 1e-14 * scale);
}

#[test]
fn coupling_cap_is_enforced() {
    let p = PhysicalParams::default().with_eps(0.1);
    let cap = StepControl::coupling_cap(&p);
    assert!((cap - 0.025).abs() < 1e-15);
    let mut c = StepControl {
        dt: 0.03,
        ..StepControl::default()
    };
    assert!(c.validate(&p).is_err());
    c.eps_dt_coupling = false;
    assert!(c.validate(&p).is_ok());
}

#[test]
fn zero_eps_is_rejected() {
    let g = grid();
    assert!(AnisoSolver::new(g, PhysicalParams::default().with_eps(0.0)).is_err());
    let f = Field::zeros(g, Parity::Even);
    assert!(project_weighted(&f, &f, &f, 0.0).is_err());
}
