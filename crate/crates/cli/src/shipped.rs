//! Shipped scenarios, run artifacts and the command helpers.

use crate::{compare_runs, read_series, run_scenario, scenario, sweep, Row, Scenario};
use spinqdd::tolerances as tol;
use std::f64::consts::PI;
use std::path::PathBuf;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn load(name: &str) -> Scenario {
    Scenario::load(&scenario_path(&format!("{name}.json"))).unwrap()
}

#[test]
fn every_shipped_scenario_loads() {
    let dir = scenario_path("");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") && path.file_name().unwrap() != "schema.json" {
            Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 3);
}

#[test]
fn published_schema_is_current() {
    let shipped: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario_path("schema.json")).unwrap()).unwrap();
    assert_eq!(shipped, serde_json::to_value(scenario::schema()).unwrap());
}

#[test]
fn equilibrium_series_is_constant() {
    let out = tempfile::tempdir().unwrap();
    let rows = run_scenario(&load("equilibrium"), out.path()).unwrap().rows;
    let first = &rows[0];
    for r in &rows {
        for col in ["mass", "max_abs_n_over_n0", "l2_n0", "l2_n1", "l2_n2", "l2_n3"] {
            let (a, b) = (r.column(col).unwrap(), first.column(col).unwrap());
            assert!((a - b).abs() < tol::EQUILIBRIUM_DRIFT, "{col} at t = {}: {a} vs {b}", r.t);
        }
    }
}

#[test]
fn gate_term_rotates_spin_at_the_linearized_rate() {
    let s = load("gate_precession");
    let out = tempfile::tempdir().unwrap();
    let rows = run_scenario(&s, out.path()).unwrap().rows;
    let c = s.initial.n[0].constant;
    let amp = s.potential.modes[0].amp;
    // ∂t n3 = 2ατ c A sin x1 at t = 0; ‖sin x1‖ = π√2 on the 2π torus
    let expected = 2.0 * s.params.alpha * s.params.tau * c * amp * PI * 2f64.sqrt();
    let r = &rows[1];
    let measured = r.l2_n3 / r.t;
    assert!((measured / expected - 1.0).abs() < tol::GATE_RATE, "rate {measured} vs {expected}");
    assert!(r.l2_n2 < 1e-6 * r.l2_n3);
}

#[test]
fn dyakonov_perel_rates_over_one_e_fold() {
    let s = load("dyakonov_perel");
    let out = tempfile::tempdir().unwrap();
    let rows = run_scenario(&s, out.path()).unwrap().rows;
    let base = 4.0 * s.params.alpha.powi(2) * s.params.tau;
    let at = |t: f64| rows.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())).unwrap();
    let rate = |r: &Row, col: &str| -(r.column(col).unwrap() / rows[0].column(col).unwrap()).ln() / r.t;
    for (col, expected) in [("l2_n1", base), ("l2_n2", base), ("l2_n3", 2.0 * base)] {
        let r = at(1.0 / expected);
        let measured = rate(r, col);
        assert!((measured / expected - 1.0).abs() < tol::RELAXATION_RATE, "{col}: {measured} vs {expected}");
    }
}

#[test]
fn manifests_are_byte_identical_for_identical_inputs() {
    let s = load("dyakonov_perel");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_scenario(&s, a.path()).unwrap();
    let rb = run_scenario(&s, b.path()).unwrap();
    let ma = std::fs::read(ra.dir.join("manifest.json")).unwrap();
    let mb = std::fs::read(rb.dir.join("manifest.json")).unwrap();
    assert_eq!(ma, mb);
    assert!(ra.dir.join("timing.json").exists());
    assert_eq!(read_series(&ra.dir.join("series.csv")).unwrap(), ra.rows);
}

#[test]
fn failed_run_dumps_the_last_valid_state() {
    let mut s = load("smooth_local");
    s.integrator.dt = 0.5;
    s.integrator.t_end = 1.0;
    let out = tempfile::tempdir().unwrap();
    let err = run_scenario(&s, out.path()).unwrap_err().to_string();
    assert!(err.contains("last valid state"), "{err}");
    let dir = out.path().join("smooth_local");
    assert!(dir.join("failure/last_valid_n0.bin").exists());
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"failed"));
}

#[test]
fn nonlocal_probe_writes_difference_fields() {
    let out = tempfile::tempdir().unwrap();
    let summary = run_scenario(&load("nonlocal_probe"), out.path()).unwrap();
    let probe: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(summary.dir.join("probe.json")).unwrap()).unwrap();
    let diffs = probe["max_abs_difference"].as_array().unwrap();
    assert_eq!(diffs.len(), 4);
    assert!(diffs[0].as_f64().unwrap() < 1e-4);
}

#[test]
fn sweep_and_compare() {
    let mut s = load("dyakonov_perel");
    s.integrator.t_end = 0.1;
    let out = tempfile::tempdir().unwrap();
    let points = sweep(&s, "tau", &[1.0, 0.5], out.path()).unwrap();
    assert_eq!(points.len(), 2);
    assert!(points[1].last.l2_n1 > points[0].last.l2_n1);
    let cols = vec!["mass".to_string(), "l2_n1".to_string()];
    let same = compare_runs(&PathBuf::from(&points[0].dir), &PathBuf::from(&points[0].dir), &cols).unwrap();
    assert!(same.max_abs_diff.iter().all(|(_, d)| *d == 0.0));
    let diff = compare_runs(&PathBuf::from(&points[0].dir), &PathBuf::from(&points[1].dir), &cols).unwrap();
    assert_eq!(diff.max_abs_diff[0].1, 0.0);
    assert!(diff.max_abs_diff[1].1 > 0.0);
    assert!(out.path().join("dyakonov_perel_sweep_tau/sweep.csv").exists());
}
