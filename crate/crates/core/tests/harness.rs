use std::path::Path;

use hydrolimit::harness::{
    check_in_memory, cmd_check, cmd_report, cmd_run, cmd_sweep, csv_text, RunConfig, RunStatus, SeriesRow, SolverKind,
    CSV_HEADER,
};
use hydrolimit::model::SourceKind;
use hydrolimit::Error;
use proptest::prelude::*;

fn small(dir: &Path, id: &str) -> RunConfig {
    let mut c = RunConfig::default();
    c.experiment_id = id.into();
    c.n = [8, 8, 8];
    c.bandlimit = 2;
    c.step.t_end = 0.05;
    c.output_dir = dir.join(id);
    c
}

#[test]
fn text_round_trip_keeps_hash() {
    let mut c = RunConfig::default();
    c.seed = 42;
    c.params.eps = 0.05;
    c.source.center = [0.25, 0.75, -0.1];
    c.eps_list = vec![0.3, 0.2, 0.1];
    let back = RunConfig::parse(&c.to_text()).unwrap();
    assert_eq!(back.hash(), c.hash());
    assert_eq!(back.to_text(), c.to_text());
}

#[test]
fn output_dir_does_not_change_hash() {
    let mut c = RunConfig::default();
    let h = c.hash();
    c.output_dir = "/somewhere/else".into();
    assert_eq!(c.hash(), h);
    c.seed += 1;
    assert_ne!(c.hash(), h);
}

#[test]
fn unknown_and_duplicate_keys_are_rejected() {
    match RunConfig::parse("seed = 3\nviscosity = 2\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(RunConfig::parse("seed = 3\nseed = 4\n").is_err());
    assert!(RunConfig::parse("just words\n").is_err());
    assert!(RunConfig::parse("# comment only\n\n  \n").is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hash_ignores_line_order(seed in 0u64..1000, eps in 0.01f64..0.5, dt in 1e-4f64..1e-2, rot in 0usize..16) {
        let text = format!("seed = {seed}\neps = {eps}\ndt = {dt}\nsolver = hydro\nn = 16\nmu = 0.01\n");
        let mut lines: Vec<&str> = text.lines().collect();
        let k = rot % lines.len();
        lines.rotate_left(k);
        lines.reverse();
        let shuffled = lines.join("\n");
        let a = RunConfig::parse(&text).unwrap();
        let b = RunConfig::parse(&shuffled).unwrap();
        prop_assert_eq!(a.hash(), b.hash());
        prop_assert_eq!(RunConfig::parse(&a.to_text()).unwrap().hash(), a.hash());
    }

    #[test]
    fn csv_rows_have_five_columns(rows in prop::collection::vec((0.0f64..1.0, 0.0f64..10.0, -1e3f64..1e3), 0..20)) {
        let rows: Vec<SeriesRow> = rows.into_iter().map(|(e, t, v)| SeriesRow::new(e, t, "q", v)).collect();
        let text = csv_text("x", &rows);
        let mut lines = text.lines();
        prop_assert_eq!(lines.next(), Some(CSV_HEADER));
        for (line, r) in lines.zip(&rows) {
            let cols: Vec<&str> = line.split(',').collect();
            prop_assert_eq!(cols.len(), 5);
            prop_assert_eq!(cols[4].parse::<f64>().unwrap(), r.value);
        }
    }
}

#[test]
fn zero_config_run_is_trivially_successful() {
    let tmp = tempfile::tempdir().unwrap();
    for solver in [SolverKind::Aniso, SolverKind::Hydro] {
        let mut c = small(tmp.path(), solver.as_str());
        c.solver = solver;
        c.amplitude = 0.0;
        c.source.kind = SourceKind::Zero;
        let r = cmd_run(&c).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        assert_eq!(r.status, RunStatus::Completed);
        let dir = c.output_path();
        for f in ["record.json", "series.csv", "timing.json", "config.txt"] {
            assert!(dir.join(f).is_file(), "{f}");
        }
        let again = RunConfig::load(&dir.join("config.txt")).unwrap();
        assert_eq!(again.hash(), r.config_hash);
    }
}

#[test]
fn step_above_coupling_cap_is_rejected_before_stepping() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(tmp.path(), "capped");
    c.params.eps = 0.01;
    c.step.dt = 0.05;
    assert!(matches!(cmd_run(&c), Err(Error::Config(_))));
    assert!(!c.output_path().join("record.json").exists());
    // the hydrostatic system has no eps and no cap
    c.solver = SolverKind::Hydro;
    assert!(cmd_run(&c).is_ok());
}

#[test]
fn snapshots_are_listed_in_the_record() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(tmp.path(), "snaps");
    c.snapshot_every = 4;
    let r = cmd_run(&c).unwrap();
    assert!(!r.snapshots.is_empty());
    for p in &r.snapshots {
        assert!(c.output_path().join(p).is_file());
    }
}

#[test]
fn sweep_needs_three_descending_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let c = small(tmp.path(), "short");
    assert!(cmd_sweep(&c, &[1.0]).is_err());
    assert!(cmd_sweep(&c, &[0.2, 0.1]).is_err());
    assert!(cmd_sweep(&c, &[0.1, 0.2, 0.05]).is_err());
}

#[test]
fn sweeps_with_the_same_seed_are_bitwise_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let eps = [0.2, 0.1, 0.05];
    let a = small(tmp.path(), "a");
    let mut b = small(tmp.path(), "b");
    b.experiment_id = "a".into();
    let ra = cmd_sweep(&a, &eps).unwrap();
    let rb = cmd_sweep(&b, &eps).unwrap();
    assert!(ra.complete && rb.complete);
    assert_eq!(ra.fits.len(), 7);
    for f in [
        "summary.json",
        "diff.csv",
        "series_hydro.csv",
        "series_eps0.05.csv",
        "fit_sup_uh_l2.dat",
    ] {
        let x = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let y = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let report = cmd_report(&a.output_path()).unwrap();
    assert!(report.contains("sup_uh_l2"));
}

#[test]
fn check_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let c = small(tmp.path(), "checks");
    assert!(check_in_memory("nonsense", &c).is_err());
    let r = cmd_check("coriolis", &c).unwrap();
    assert!(r.pass, "{:?}", r.items);
    assert!(c.output_path().join("check_coriolis.json").is_file());
    let m = check_in_memory("mollifier", &c).unwrap();
    assert!(m.pass, "{:?}", m.items);
}

#[test]
fn default_hydro_run_balances_the_tracer() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default();
    c.solver = SolverKind::Hydro;
    c.output_dir = tmp.path().join("hydro");
    let r = cmd_run(&c).unwrap();
    assert!(r.completed());
    assert!(r.verdict("tracer_budget").unwrap().pass);
    assert!(r.verdict("max_principle").unwrap().pass);
}
