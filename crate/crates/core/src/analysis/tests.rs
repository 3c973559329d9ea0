use super::*;
use crate::aniso::{init_random_state, AnisoSolver, AnisoState};
use crate::error::Error;
use crate::fields::{Field, Parity, SpectralGrid};
use crate::forcing::NoForcing;
use crate::hydro::{HydroState, SurfaceField};
use crate::model::PhysicalParams;
use std::f64::consts::PI;

fn grid() -> SpectralGrid {
    SpectralGrid::new(16, 16, 16, 1.0).unwrap()
}

fn record(eps: f64, v: f64) -> DiffRecord {
    DiffRecord {
        eps,
        sup_uh_l2: v,
        ..DiffRecord::default()
    }
}

#[test]
fn power_laws_are_recovered_exactly() {
    for p in [1.0, 2.0] {
        let recs: Vec<_> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&e: &f64| record(e, 3.0 * e.powf(p)))
            .collect();
        let fit = fit_rate(&recs, "sup_uh_l2").unwrap();
        assert!((fit.slope - p).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn rate_fit_needs_three_points() {
    let recs = [record(1.0, 1.0), record(0.5, 0.5)];
    assert!(matches!(fit_rate(&recs, "sup_uh_l2"), Err(Error::Contract(_))));
    let recs = [record(1.0, 1.0), record(0.5, 0.5), record(0.25, 0.2)];
    assert!(fit_rate(&recs, "nonsense").is_err());
}

fn hydro_twin(a: &AnisoState) -> HydroState {
    HydroState {
        u1: a.u1.clone(),
        u2: a.u2.clone(),
        c: a.c.clone(),
        p_s: SurfaceField::zeros(a.grid()),
        t: a.t,
    }
}

#[test]
fn identical_trajectories_have_zero_difference() {
    let g = grid();
    let mut a = init_random_state(&g, 4, 1.0, 4).unwrap();
    a.u3 = hydro_twin(&a).u3().unwrap();
    let mut b = a.clone();
    b.t = 0.1;
    let aniso = vec![a.clone(), b.clone()];
    let hydro = vec![hydro_twin(&a), hydro_twin(&b)];
    let r = diff_norms(&aniso, &hydro, 0.1).unwrap();
    for k in DIFF_KEYS {
        assert_eq!(r.get(k).unwrap(), 0.0, "{k}");
    }
    assert!(diff_norms(&aniso[..1], &hydro, 0.1).is_err());
}

#[test]
fn difference_norms_match_a_single_mode() {
    let g = grid();
    let mut a = AnisoState::zeros(&g);
    a.c = Field::from_fn(g, Parity::Odd, |x| (2.0 * PI * x[1]).sin() * (PI * x[2]).sin());
    let h = HydroState::zeros(&g);
    let u3 = Field::zeros(g, Parity::Odd);
    let s = diff_sample(&a, &h, &u3, 0.5).unwrap();
    // ||c||^2 = volume / 4, |k|^2 = 4 pi^2 + pi^2
    let l2 = (2.0f64 / 4.0).sqrt();
    assert!((s.c_h1 - l2 * (1.0 + 5.0 * PI * PI).sqrt()).abs() < 1e-12);
    let gd = l2 * l2 * 5.0 * PI * PI * (1.0 + 5.0 * PI * PI);
    assert!((s.gradd_c_h1_sq - gd).abs() < 1e-9 * gd);
}

#[test]
fn diffusion_only_run_closes_the_budget() {
    let g = grid();
    let p = PhysicalParams::default().with_eps(0.3);
    let solver = AnisoSolver::new(g, p).unwrap();
    let mut s = AnisoState::zeros(&g);
    s.c = Field::from_fn(g, Parity::Odd, |x| {
        (2.0 * PI * x[0]).cos() * (PI * x[2]).sin() + 0.3 * (4.0 * PI * x[1]).sin() * (2.0 * PI * x[2]).sin()
    });
    let mut m = EnergyMonitor::new(g, p);
    m.push(&s, None).unwrap();
    for _ in 0..20 {
        s = solver.step(&s, &NoForcing, 0.02).unwrap();
        m.push(&s, None).unwrap();
    }
    let r = m.report();
    assert!(r.max_abs_relative_slack < 1e-12, "{}", r.max_abs_relative_slack);
    assert!(r.budget.dissipation_c_downwind.last().unwrap() > &0.0);
}

#[test]
fn unforced_energy_does_not_grow() {
    let g = grid();
    let p = PhysicalParams::default().with_eps(0.2);
    let solver = AnisoSolver::new(g, p).unwrap();
    let mut s = init_random_state(&g, 8, 1.0, 4).unwrap();
    let mut m = EnergyMonitor::new(g, p);
    m.push(&s, None).unwrap();
    for _ in 0..20 {
        s = solver.step(&s, &NoForcing, 0.005).unwrap();
        m.push(&s, None).unwrap();
    }
    let r = m.report();
    assert!(r.max_relative_slack < 1e-3, "{}", r.max_relative_slack);
    let b = &r.budget;
    assert!(b.energy(b.len() - 1) < b.energy(0));
    for series in [&b.dissipation_visc_h, &b.dissipation_visc_3_weighted, &b.dissipation_c] {
        assert!(series.iter().all(|&d| d >= 0.0));
    }
}

#[test]
fn irregular_sampling_is_rejected() {
    let g = grid();
    let p = PhysicalParams::default();
    let mut m = EnergyMonitor::new(g, p);
    let mut s = AnisoState::zeros(&g);
    for t in [0.0, 0.1, 0.25] {
        s.t = t;
        let r = m.push(&s, None);
        if t == 0.25 {
            assert!(matches!(r, Err(Error::Contract(_))));
        }
    }
}

fn apriori_run(eps: f64, scale: f64) -> AprioriRun {
    let g = SpectralGrid::new(8, 8, 8, 1.0).unwrap();
    let mut m = AprioriMonitor::new(eps);
    for i in 0..3 {
        let mut s = AnisoState::zeros(&g);
        s.t = 0.1 * i as f64;
        s.c = Field::from_fn(g, Parity::Odd, |x| {
            scale * (-(s.t)).exp() * (2.0 * PI * x[0]).cos() * (PI * x[2]).sin()
        });
        m.push(&s);
    }
    m.finish()
}

#[test]
fn eps_independent_data_gives_equal_quantities() {
    let runs: Vec<_> = [0.2, 0.1, 0.05, 0.025].iter().map(|&e| apriori_run(e, 1.0)).collect();
    for key in APRIORI_KEYS {
        let vals: Vec<f64> = runs.iter().map(|r| r.values[key]).collect();
        if key == "l2_l2_sqrt_eps_d1c" {
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        } else {
            assert!(vals
                .iter()
                .all(|v| (v - vals[0]).abs() <= 1e-14 * vals[0].abs().max(1e-300)));
        }
    }
    assert!(apriori_check(&runs).unwrap().pass);
}

#[test]
fn data_scaled_by_inverse_eps_fails() {
    let runs: Vec<_> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&e| apriori_run(e, 1.0 / e))
        .collect();
    assert!(!apriori_check(&runs).unwrap().pass);
}

#[test]
fn adding_a_larger_eps_keeps_a_pass() {
    let mut runs: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&e| apriori_run(e, 1.0 + e)).collect();
    assert!(apriori_check(&runs).unwrap().pass);
    runs.push(apriori_run(0.4, 0.3));
    assert!(apriori_check(&runs).unwrap().pass);
}

#[test]
fn mismatched_sweep_is_rejected() {
    let mut runs: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&e| apriori_run(e, 1.0)).collect();
    runs[1].samples = 7;
    assert!(matches!(apriori_check(&runs), Err(Error::Contract(_))));
}

#[test]
fn ladyzhenskaya_constants_closed_form() {
    for a in [0.5, 1.0] {
        let g = SpectralGrid::new(8, 8, 8, a).unwrap();
        let one = Field::constant(g, 1.0);
        let t = ladyzhenskaya_terms(&one, &one, &one);
        let h = 2.0 * a;
        assert!((t.lhs - h * h).abs() < 1e-12);
        assert!((t.rhs_fh - h.powf(1.5)).abs() < 1e-12);
        assert!((t.rhs_gh - h.powf(1.5)).abs() < 1e-12);
        let r = t.ratios().unwrap();
        assert!((r[0] - h.sqrt()).abs() < 1e-12);
    }
    let g = SpectralGrid::new(8, 8, 8, 1.0).unwrap();
    let zero = Field::zeros(g, Parity::None);
    assert!(ladyzhenskaya_terms(&zero, &zero, &zero).ratios().is_none());
}

#[test]
fn ladyzhenskaya_with_vertically_constant_factor() {
    let g = grid();
    let f = Field::from_fn(g, Parity::None, |x| {
        1.0 + 0.5 * (2.0 * PI * x[0]).sin() * (PI * x[2]).cos()
    });
    let gg = Field::from_fn(g, Parity::None, |x| (2.0 * PI * x[1]).cos() + 0.2 * (PI * x[2]).sin());
    let h = Field::from_fn(g, Parity::None, |x| {
        2.0 + (4.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin()
    });
    let t = ladyzhenskaya_terms(&f, &gg, &h);
    let r = t.ratios().unwrap();
    assert!(r.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!(t.lhs <= 2.0 * t.rhs_gh);
}

#[test]
fn ladyzhenskaya_sampling_is_deterministic() {
    let g = SpectralGrid::new(12, 12, 12, 1.0).unwrap();
    let a = ladyzhenskaya_sample(&g, 3, 40, 3).unwrap();
    let b = ladyzhenskaya_sample(&g, 3, 40, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.samples + a.skipped, 40);
    assert!(a.holds(10.0));
}

#[test]
fn physical_concentration_unshifts() {
    let g = SpectralGrid::new(8, 8, 8, 0.5).unwrap();
    let c = physical_concentration(&Field::zeros(g, Parity::Odd));
    for i3 in 0..8 {
        let z = g.point(0, 0, i3)[2];
        assert!((c.at(0, 0, i3) + z / 0.5).abs() < 1e-15);
    }
    assert!((c.max_abs() - 1.0).abs() < 1e-15);
}

#[test]
fn max_principle_envelope_and_negative_control() {
    let g = SpectralGrid::new(8, 8, 8, 1.0).unwrap();
    let zero = Field::zeros(g, Parity::Odd);
    let mut ok = MaxPrincipleMonitor::new(1.0, 0.0);
    ok.push(0.0, &zero);
    assert!(ok.report().holds());
    let big = Field::constant(g, 0.0).add(&Field::from_fn(g, Parity::Odd, |x| 3.0 * (PI * x[2]).sin()));
    let mut bad = MaxPrincipleMonitor::with_envelope(2.0, 0.0);
    bad.push(0.5, &big);
    assert_eq!(bad.report().first_violation, Some(0.5));
}

#[test]
fn tracer_budget_residual() {
    let mut b = TracerBudget::new();
    b.push(0.0, 1.0, 2.0);
    b.push(0.1, 1.2, 2.0);
    b.push(0.2, 1.4, 2.0);
    assert!(b.max_residual < 1e-15);
    b.push(0.3, 1.7, 2.0);
    assert!((b.max_residual - 0.1).abs() < 1e-12);
}

#[test]
fn monotone_helper() {
    assert!(decreasing_with(&[0.1, 0.05, 0.025], &[3.0, 2.0, 1.0]));
    assert!(!decreasing_with(&[0.1, 0.05, 0.025], &[3.0, 3.0, 1.0]));
}
