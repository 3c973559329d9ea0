use super::*;
use crate::fields::{derive, Axis};

fn params() -> PhysicalParams {
    PhysicalParams::default().with_eps(0.2)
}

#[test]
fn jet_rules_match_closed_forms() {
    let x = 0.37;
    let j = Jet::sin(1.0, 0.0, x).exp();
    let e = x.sin().exp();
    assert!((j.0[1] - x.cos() * e).abs() < 1e-14);
    assert!((j.0[2] - (x.cos().powi(2) - x.sin()) * e).abs() < 1e-14);
    let third = (-x.cos() - 3.0 * x.sin() * x.cos() + x.cos().powi(3)) * e;
    assert!((j.0[3] - third).abs() < 1e-13);

    // sin(x) cos(x) = sin(2x) / 2
    let p = Jet::sin(1.0, 0.0, x).mul(Jet::cos(1.0, x));
    let q = Jet::sin(2.0, 0.0, x).scale(0.5);
    for n in 0..ORDER {
        assert!((p.0[n] - q.0[n]).abs() < 1e-12, "order {n}");
    }
}

#[test]
fn jet_derivatives_match_finite_differences() {
    let f = |x: f64| Jet::sin(3.0, 0.2, x).mul(Jet::cos(2.0, x).scale(0.7).exp());
    let (x, h) = (0.41, 1e-5);
    for n in 0..ORDER - 1 {
        let fd = (f(x + h).0[n] - f(x - h).0[n]) / (2.0 * h);
        let scale = f(x).0[n + 1].abs().max(1.0);
        assert!((fd - f(x).0[n + 1]).abs() < 1e-6 * scale, "order {n}");
    }
}

#[test]
fn exact_solution_is_admissible() {
    for b in [0.0, 0.8] {
        let g = SpectralGrid::cubic(24, 1.0).unwrap();
        let m = Manufactured::new(params(), MmsSystem::Aniso, b).unwrap();
        let s = m.aniso_state(&g, 0.3);
        assert!(s.parity_defect() < 1e-12);
        let div = derive(&s.u1, Axis::X1, 1)
            .add(&derive(&s.u2, Axis::X2, 1))
            .add(&derive(&s.u3, Axis::X3, 1));
        let tol = if b == 0.0 { 1e-12 } else { 1e-4 };
        assert!(div.l2_norm() < tol * s.u1.l2_norm(), "sharpness {b}: {}", div.l2_norm());
        let h = m.hydro_state(&g, 0.3);
        let u3 = h.u3().unwrap();
        if b == 0.0 {
            assert!(u3.sub(&s.u3).max_abs() < 1e-12);
        }
    }
}

#[test]
fn time_derivative_matches_difference_quotient() {
    let g = SpectralGrid::cubic(8, 1.0).unwrap();
    let m = Manufactured::new(params(), MmsSystem::Aniso, 0.5).unwrap();
    let (t, h) = (0.2, 1e-6);
    let rate = m.exact_rate(&g, t);
    let (a, b) = (m.exact(&g, t + h), m.exact(&g, t - h));
    for i in 0..4 {
        let fd = a[i].sub(&b[i]).scale(0.5 / h);
        assert!(fd.sub(&rate[i]).max_abs() < 1e-6);
    }
}

#[test]
fn aniso_tendency_matches_exact_rate() {
    let g = SpectralGrid::cubic(16, 1.0).unwrap();
    let m = Manufactured::new(params(), MmsSystem::Aniso, 0.0).unwrap();
    let solver = AnisoSolver::new(g, m.params).unwrap();
    let t = 0.7;
    let f = solver.tendency(&m.aniso_state(&g, t), &m.forcing(&g)).unwrap();
    let rate = m.exact_rate(&g, t);
    for (got, want) in [&f.f1, &f.f2, &f.f3, &f.fc].into_iter().zip(&rate) {
        assert!(got.sub(want).max_abs() < 1e-8, "{}", got.sub(want).max_abs());
    }
}

#[test]
fn hydro_tendency_matches_exact_rate() {
    let g = SpectralGrid::cubic(16, 1.0).unwrap();
    let m = Manufactured::new(params(), MmsSystem::Hydro { mu: 0.3 }, 0.0).unwrap();
    let solver = HydroSolver::new(g, m.params, HydroOptions { mu: 0.3 }).unwrap();
    let t = 0.7;
    let f = solver.tendency(&m.hydro_state(&g, t), &m.forcing(&g)).unwrap();
    let rate = m.exact_rate(&g, t);
    for (got, want) in [&f.f1, &f.f2, &f.fc].into_iter().zip([&rate[0], &rate[1], &rate[3]]) {
        assert!(got.sub(want).max_abs() < 1e-8, "{}", got.sub(want).max_abs());
    }
}

#[test]
fn second_order_in_time() {
    let g = SpectralGrid::cubic(16, 1.0).unwrap();
    for system in [MmsSystem::Aniso, MmsSystem::Hydro { mu: 0.0 }] {
        let m = Manufactured::new(params(), system, 0.0).unwrap();
        let study = temporal_study(&m, &g, &[0.01, 0.005, 0.0025], 0.2).unwrap();
        assert!(study.min_rate() >= 1.9, "{system:?}: {study:?}");
    }
}

#[test]
fn spectral_in_space() {
    for system in [MmsSystem::Aniso, MmsSystem::Hydro { mu: 0.0 }] {
        let m = Manufactured::new(params(), system, 1.0).unwrap();
        let study = spatial_study(&m, &[16, 24], 2e-3, 0.02).unwrap();
        assert!(study.rates[0] >= 10.0, "{system:?}: {study:?}");
    }
}

#[test]
fn misaligned_end_time_rejected() {
    let g = SpectralGrid::cubic(8, 1.0).unwrap();
    let m = Manufactured::new(params(), MmsSystem::Aniso, 0.0).unwrap();
    assert!(m.run_error(&g, 0.03, 0.1).is_err());
    assert!(Manufactured::new(params(), MmsSystem::Hydro { mu: -1.0 }, 0.0).is_err());
}
