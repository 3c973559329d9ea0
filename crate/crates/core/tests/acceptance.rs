//! Acceptance gate: the headline sweep plus the property suites, one
//! pass/fail line per criterion. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hydrolimit::analysis::{MIN_R_SQUARED, MIN_SLOPE};
use hydrolimit::harness::{
    check_in_memory, cmd_sweep, energy_study, CheckReport, RunConfig, SweepReport, BUDGET_TOL, CORIOLIS_TOL,
    ENERGY_TOL, STRUCTURE_TOL,
};

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn verdict_pass(s: &SweepReport, names: &[&str]) -> (bool, String) {
    let mut ok = s.hydro.completed();
    let mut worst = Vec::new();
    for name in names {
        let mut max = 0.0_f64;
        for r in std::iter::once(&s.hydro).chain(&s.runs) {
            ok &= r.completed();
            if let Some(v) = r.verdict(name) {
                ok &= v.pass;
                max = max.max(v.value);
            }
        }
        worst.push(format!("{name}={max:.2e}"));
    }
    (ok, worst.join(" "))
}

fn suite(name: &str, cfg: &RunConfig) -> CheckReport {
    match check_in_memory(name, cfg) {
        Ok(r) => r,
        Err(e) => CheckReport {
            suite: name.into(),
            pass: false,
            items: Vec::new(),
            details: serde_json::json!({ "error": e.to_string() }),
        },
    }
}

fn items(r: &CheckReport) -> String {
    if r.items.is_empty() {
        return r.details.to_string();
    }
    r.items
        .iter()
        .map(|v| format!("{}={:.3e}", v.name, v.value))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut cfg = RunConfig::default();
    cfg.experiment_id = "acceptance".into();
    cfg.output_dir = tmp.path().join("sweep");
    let eps = cfg.eps_list.clone();
    let mut lines = Vec::new();

    let sweep = match cmd_sweep(&cfg, &eps) {
        Ok(s) => s,
        Err(e) => {
            println!("acceptance: sweep failed to start: {e}");
            return ExitCode::FAILURE;
        }
    };

    let fit_line = |key: &str, need_r2: bool| match sweep.fit(key) {
        Some(f) => (
            sweep.complete && f.slope >= MIN_SLOPE && (!need_r2 || f.r_squared >= MIN_R_SQUARED),
            format!("slope={:.3} r2={:.4}", f.slope, f.r_squared),
        ),
        None => (false, format!("no fit; failures {:?}", sweep.failures)),
    };

    let (pass, detail) = fit_line("sup_uh_l2", true);
    lines.push(Line {
        id: 1,
        name: "velocity eps-rate",
        pass,
        detail,
    });

    let (slope_ok, detail) = fit_line("sup_c_h1", false);
    lines.push(Line {
        id: 2,
        name: "concentration eps-rate",
        pass: slope_ok && sweep.gradd_c_decreasing,
        detail: format!("{detail} downwind_gradient_decreasing={}", sweep.gradd_c_decreasing),
    });

    let mut energy_ok = sweep.complete && sweep.energy_reports.len() == eps.len();
    let mut energy_detail = Vec::new();
    for (e, base) in eps.iter().zip(&sweep.energy_reports) {
        match energy_study(&cfg, *e, 3, Some(base)) {
            Ok(s) => {
                energy_ok &= s.pass;
                energy_detail.push(format!(
                    "eps={e}: slack={:.2e} ratios={:.2}/{:.2}",
                    s.max_relative_slack[0], s.ratios[0], s.ratios[1]
                ));
            }
            Err(err) => {
                energy_ok = false;
                energy_detail.push(format!("eps={e}: {err}"));
            }
        }
    }
    lines.push(Line {
        id: 3,
        name: "energy inequality",
        pass: energy_ok && sweep.energy.iter().all(|e| e.max_relative_slack <= ENERGY_TOL),
        detail: energy_detail.join("; "),
    });

    let (pass, detail) = match &sweep.apriori {
        Some(a) => {
            let worst = a.ratios.iter().max_by(|x, y| x.1.total_cmp(y.1));
            (a.pass, format!("worst {worst:?} limit {}", a.limit))
        }
        None => (false, "not evaluated".into()),
    };
    lines.push(Line {
        id: 4,
        name: "a priori uniformity",
        pass,
        detail,
    });

    let (run_ok, run_detail) = verdict_pass(
        &sweep,
        &["coriolis_work", "divergence", "barotropic", "parity", "tracer_budget"],
    );
    let mollifier = suite("mollifier", &cfg);
    lines.push(Line {
        id: 5,
        name: "structural exactness",
        pass: run_ok && mollifier.pass,
        detail: format!(
            "{run_detail} (limits {CORIOLIS_TOL:.0e}/{STRUCTURE_TOL:.0e}/{BUDGET_TOL:.0e}) {}",
            items(&mollifier)
        ),
    });

    let (hydro_mp, _) = verdict_pass(&sweep, &["max_principle"]);
    let mp = suite("max_principle", &cfg);
    lines.push(Line {
        id: 6,
        name: "maximum principle",
        pass: hydro_mp && mp.pass,
        detail: items(&mp),
    });

    let mu = suite("mu_sweep", &cfg);
    lines.push(Line {
        id: 7,
        name: "mu-regularization limit",
        pass: mu.pass,
        detail: mu.details["distance"].to_string(),
    });

    let mms = suite("mms", &cfg);
    lines.push(Line {
        id: 8,
        name: "manufactured solutions",
        pass: mms.pass,
        detail: items(&mms),
    });

    let lady = suite("ladyzhenskaya", &cfg);
    lines.push(Line {
        id: 9,
        name: "ladyzhenskaya form",
        pass: lady.pass,
        detail: items(&lady),
    });

    for l in &lines {
        println!(
            "[{}] criterion {} {}: {}",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail
        );
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s",
        lines.len() - failed,
        lines.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
