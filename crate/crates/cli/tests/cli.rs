use std::path::Path;
use std::process::{Command, Output};

fn predict(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_predict"));
    cmd.args(args).env_remove("PREDICT_SEED");
    if let Some(s) = env_seed {
        cmd.env("PREDICT_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const EMPTY_RUN: &str = r#"{"mode": "oblivious", "T": 0, "alpha": 0.1, "beta": 0.1, "eps": 1.0,
    "delta": 1e-5, "trials": 1, "seed": 3, "domain_size": 64,
    "bt": {"eps": 1.0, "delta": 0.01, "beta": 1e-6}, "block_size": 1}"#;

const SMALL_RUN: &str = r#"{"mode": "oblivious", "T": 64, "alpha": 0.1, "beta": 0.1, "eps": 1.0,
    "delta": 1e-5, "trials": 3, "seed": 11, "domain_size": 256,
    "bt": {"k": 400, "delta": 0.01, "beta": 0.01}, "block_size": 8,
    "gate": {"max_top_count": 1000, "min_fraction": 1.0}}"#;

fn csv_path(stdout: &[u8]) -> String {
    String::from_utf8(stdout.to_vec()).unwrap().trim().to_string()
}

#[test]
fn empty_run_writes_one_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), EMPTY_RUN);
    let out = predict(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(csv_path(&out.stdout)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "seed,top_count,max_block_error,final_eps,final_delta,wrong_prediction_count,fallback_count,wall_ms"
    );
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split(',').nth(1), Some("0"));
}

#[test]
fn same_seed_gives_identical_csv_and_seed_precedence_holds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let a = predict(&["run", "--config", &cfg, "--out", out_a.to_str().unwrap()], None);
    let b = predict(&["run", "--config", &cfg, "--out", out_b.to_str().unwrap(), "--workers", "2"], None);
    assert!(a.status.success() && b.status.success());
    let (pa, pb) = (csv_path(&a.stdout), csv_path(&b.stdout));
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());

    let env = predict(&["run", "--config", &cfg, "--out", out_a.to_str().unwrap()], Some("99"));
    assert_ne!(csv_path(&env.stdout), pa, "PREDICT_SEED changes the run");
    let flag = predict(&["run", "--config", &cfg, "--out", out_a.to_str().unwrap(), "--seed", "11"], Some("99"));
    assert_eq!(csv_path(&flag.stdout), pa, "--seed wins over PREDICT_SEED");
}

#[test]
fn failing_gate_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_RUN.replace("\"max_top_count\": 1000", "\"max_top_count\": 0").replace("\"k\": 400", "\"k\": 200");
    let cfg = write_config(dir.path(), &body);
    let out = predict(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--trials", "4"], None);
    // With T = 64 window queries some run is expected to hit Top at least once.
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn plan_prints_json() {
    let out = predict(
        &["plan", "--mode", "halfspace", "--d", "2", "--T", "1024", "--alpha", "0.1", "--beta", "0.1", "--eps", "1", "--delta", "1e-6"],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["alpha_bt"].as_f64(), Some(0.1 / 4.0));
    assert_eq!(v["n"].as_u64(), Some(v["k"].as_u64().unwrap() * v["m"].as_u64().unwrap()));
}

#[test]
fn invalid_config_is_a_diagnosed_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"mode": "oblivious"}"#);
    let out = predict(&["run", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn audit_reports_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"trials": 1000}"#);
    let out = predict(&["audit", "--config", &cfg], None);
    assert!(out.status.code().is_some_and(|c| c == 0 || c == 2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["budget"].as_f64().unwrap() > 0.0);
    assert_eq!(v["honest"]["trials"].as_u64(), Some(1000));
    assert_eq!(v["broken"]["trials"].as_u64(), Some(1000));
}
