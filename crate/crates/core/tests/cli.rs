use std::path::Path;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transfer-spectra"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const DIAGONAL: &str = r#"{
  "version": 1,
  "operator": {"kind": "branches", "branches": [
    {"type": "affine", "weight": [1.0, 0.0], "matrix": [[[0.5, 0.0]]], "offset": [[0.0, 0.0]]}
  ]},
  "geometry": {"center": [[0.0, 0.0]], "radius": 1.0},
  "params": {"r": 0.5, "W": 1.0},
  "numerics": {"size": 8, "sizes": [4, 8]}
}"#;

#[test]
fn bounds_csv_for_gauss() {
    let out = run(&["bounds", "--preset", "gauss", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,explicit_general,explicit_d1,geommean_weyl,approx_number");
    assert_eq!(lines.len(), 4);
    let d1 = |line: &str| line.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    let first = 3.0 * std::f64::consts::PI.powi(2) / (2.0 * 5f64.sqrt());
    assert!((d1(lines[1]) - first).abs() < 1e-12 * first);
    assert!((d1(lines[3]) - first * 2.0 / 3.0).abs() < 1e-12 * first);
}

#[test]
fn empty_bounds_table() {
    let out = run(&["bounds", "--n-max", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 0);
    assert_eq!(v["meta"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn diagonal_spectrum_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "diag.json", DIAGONAL);
    let out = run(&["spectrum", "--config", &config, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for (k, row) in v["rows"].as_array().unwrap().iter().enumerate() {
        let re = row["re"].as_f64().unwrap();
        assert!((re - 0.5f64.powi(k as i32)).abs() < 1e-12, "{k}: {re}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "diag.json", DIAGONAL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["spectrum", "--config", &config, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_config(
        dir.path(),
        "rho.json",
        r#"{"version": 1, "numerics": {"size": 8, "rho": 0.5}}"#,
    );
    let out = run(&["spectrum", "--config", &rho]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho"));

    let unknown = write_config(dir.path(), "unknown.json", r#"{"version": 1, "mode": "fast"}"#);
    assert_eq!(run(&["bounds", "--config", &unknown]).status.code(), Some(2));
    let broken = write_config(dir.path(), "broken.json", "{ not json");
    assert_eq!(run(&["bounds", "--config", &broken]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--config", "/nonexistent/config.json"]).status.code(), Some(2));

    let out = run(&["bounds", "--params", "r=1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.r"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn thread_variable() {
    let out = binary()
        .args(["bounds", "--n-max", "2"])
        .env("TRANSFER_SPECTRA_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = binary()
        .args(["bounds", "--n-max", "2"])
        .env("TRANSFER_SPECTRA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn understated_weight_bound_is_a_violation() {
    // W = 0.1 puts the first bound below |lambda_1| = 1
    let out = run(&["verify", "--size", "40", "--params", "W=0.1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound violated"));
}

#[test]
fn gauss_verify_passes() {
    let out = run(&["verify", "--size", "30", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let result = &v["summary"]["result"];
    assert!(result["checked"].as_u64().unwrap() >= 5);
    assert_eq!(result["failed"].as_array().unwrap().len(), 0);
}

#[test]
fn converge_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "diag.json", DIAGONAL);
    let out = run(&["converge", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,re_4,im_4,re_8,im_8,delta_4_8,stable\n"));
    // shared indices agree exactly up to rounding
    let second = text.lines().nth(2).unwrap();
    let delta: f64 = second.split(',').nth(5).unwrap().parse().unwrap();
    assert!(delta < 1e-14);
}
