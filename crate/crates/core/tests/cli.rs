use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CASE1: &str = r#"{
    "grid": { "dimension": 1, "extents": [0.0, 1.0], "n": 20 },
    "species": [ { "name": "c", "charge": 1.0, "initial": { "kind": "constant", "value": 1.0 } } ],
    "boundary": { "sigma_a": -1.0, "sigma_b": 0.0 },
    "time": { "t_final": 0.05 },
    "output": { "snapshot_every": 100 }
}"#;

fn pnp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnp")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_config(text: &str) -> (Output, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, text);
    let out = dir.path().join("out");
    let output = pnp(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    (output, dir)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn run_writes_trace_snapshots_and_summary() {
    let (output, dir) = run_config(CASE1);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let out = dir.path().join("out");
    let trace = read(&out, "trace.csv");
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,dt,mass_c,F,dissipation,min_c"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows.last().unwrap()[0], 0.05);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    for r in &rows {
        assert!((r[2] - 1.0).abs() < 1e-12, "mass {}", r[2]);
    }

    let snapshot = read(&out, "snapshot_0.csv");
    assert_eq!(snapshot.lines().next(), Some("x,c_c,psi"));
    assert_eq!(snapshot.lines().count(), 21);
    let steps = rows.len() - 1;
    assert!(out.join(format!("snapshot_{steps}.csv")).exists());

    let summary: serde_json::Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
    assert_eq!(summary["termination"], "t_final_reached");
    assert_eq!(summary["step_bound_kind"], "proven");
}

#[test]
fn steady_mode_reaches_the_plateau() {
    let text = CASE1.replace("\"t_final\": 0.05", "\"steady_state\": true, \"max_time\": 20.0");
    let (output, dir) = run_config(&text);
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("out"), "summary.json")).unwrap();
    assert_eq!(summary["termination"], "steady_state");
    let f = summary["final_free_energy"].as_f64().unwrap();
    assert!((f - 0.15375).abs() < 1e-2, "F = {f}");
}

#[test]
fn two_dimensional_snapshots_carry_both_coordinates() {
    let text = r#"{
        "grid": { "dimension": 2, "extents": [0.0, 1.0, 0.0, 1.0], "n": 5 },
        "species": [ { "name": "c", "charge": 1.0, "initial": { "kind": "constant", "value": 4.0 } } ],
        "boundary": { "left": -1.0, "right": -1.0, "bottom": -1.0, "top": -1.0 },
        "time": { "t_final": 0.01 }
    }"#;
    let (output, dir) = run_config(text);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let out = dir.path().join("out");
    assert_eq!(read(&out, "snapshot_0.csv").lines().next(), Some("x,y,c_c,psi"));
    let summary: serde_json::Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
    assert_eq!(summary["step_bound_kind"], "heuristic");
}

#[test]
fn zero_species_finishes_immediately() {
    let text = r#"{
        "grid": { "dimension": 1, "extents": [0.0, 1.0], "n": 8 },
        "species": [],
        "boundary": { "sigma_a": 0.0, "sigma_b": 0.0 },
        "time": { "t_final": 1.0 }
    }"#;
    let (output, dir) = run_config(text);
    assert!(output.status.success());
    let trace = read(&dir.path().join("out"), "trace.csv");
    assert_eq!(trace.lines().next(), Some("t,dt,F,dissipation,min_c"));
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let (malformed, _d1) = run_config("{ \"grid\": ");
    assert_eq!(malformed.status.code(), Some(2));

    let (incompatible, _d2) = run_config(&CASE1.replace("\"sigma_a\": -1.0", "\"sigma_a\": 0.0"));
    assert_eq!(incompatible.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&incompatible.stderr).contains("defect"));

    let too_large = CASE1.replace("\"t_final\": 0.05", "\"t_final\": 0.05, \"k\": 0.01")
        .replace("\"output\"", "\"cfl\": { \"policy\": \"strict\" }, \"output\"");
    let (cfl, _d3) = run_config(&too_large);
    assert_eq!(cfl.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&cfl.stderr).contains("bound"));

    let missing = pnp(&["run", "--config", "/nonexistent/pnp.json", "--out", "/tmp/unused"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn converge_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv");
    let output = pnp(&["converge", "--case", "paper-1d-case1", "--h", "0.2,0.1,0.05", "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let table = read(&out, "convergence.csv");
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("h,error_c,order_c,error_psi,order_psi"));
    let orders: Vec<f64> = lines.skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(orders.iter().all(|o| (1.8..=2.3).contains(o)), "{orders:?}");

    let unknown = pnp(&["converge", "--case", "no-such-case", "--out", out.to_str().unwrap()]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn neutral_pair_converges_at_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv");
    let output = pnp(&["converge", "--case", "neutral-pair-diffusion", "--h", "0.05,0.025,0.0125", "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let table = read(&out, "convergence.csv");
    // coarse rows are pre-asymptotic: 1.89 at h = 0.025, 2.01 at h = 0.0125
    for (row, line) in table.lines().skip(2).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let order: f64 = cols[2].parse().unwrap();
        let window = if row == 0 { 1.8..=2.2 } else { 1.9..=2.1 };
        assert!(window.contains(&order), "{line}");
        // the charge source cancels, so the potential stays at zero
        assert!(cols[3].parse::<f64>().unwrap() < 1e-12, "{line}");
    }
}

#[test]
fn converge_from_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, CASE1);
    let out = dir.path().join("conv");
    let output = pnp(&["converge", "--config", &cfg, "--h", "0.1,0.05", "--out", out.to_str().unwrap()]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    assert_eq!(read(&out, "convergence.csv").lines().count(), 3);
}

#[test]
fn cases_lists_every_builtin() {
    let output = pnp(&["cases"]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    for case in pnp::harness::builtin_cases() {
        assert!(text.contains(&case.name));
    }
}
