use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn radsing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radsing"))
        .args(args)
        .env_remove("RADSING_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn constants_payload() {
    let out = radsing(&["constants", "--n", "5", "--alpha", "2", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["A"], 2.0);
    assert_eq!(v["a0"], 1.0);
    assert_eq!(v["b0"], 2.0);
    assert_eq!(v["lambda_minus"], -2.0);
    assert_eq!(v["identity_residual"], 0.0);
}

#[test]
fn inadmissible_alpha_is_a_usage_error() {
    let out = radsing(&["constants", "--n", "3", "--alpha", "3", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("(3, 5)"));
}

#[test]
fn config_files_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("c.toml");
    fs::write(&toml, "n = 5\nalpha = 2.0\nbeta = 0.0\n").unwrap();
    let out = radsing(&["constants", "--config", toml.to_str().unwrap(), "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["A"].as_f64().unwrap() - 1.0).abs() < 1e-14);

    let js = dir.path().join("c.json");
    fs::write(&js, r#"{"n": 5, "alpha": 2.0, "beta": 0.0}"#).unwrap();
    let out = radsing(&["constants", "--config", js.to_str().unwrap()]);
    assert_eq!(json(&out)["A"], 2.0);

    fs::write(&toml, "n = 5\nalpha = 2.0\nbeta = 0.0\ngamma = 1\n").unwrap();
    let out = radsing(&["constants", "--config", toml.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_radsing"))
        .args(["simulate", "--n", "5", "--alpha", "2", "--beta", "0", "--psi0", "2.5", "--T", "40"])
        .env("RADSING_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["last"]["y"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!(v["psi_residual"].as_f64().unwrap() < 1e-5);
    let csv = fs::read_to_string(v["csv"].as_str().unwrap()).unwrap();
    assert!(v["csv"].as_str().unwrap().starts_with(dir.path().to_str().unwrap()));
    assert_eq!(csv.lines().next(), Some("t,psi,psi_t,psi_tt"));
}

#[test]
fn simulate_reports_events_with_exit_three() {
    let out = radsing(&[
        "simulate", "--n", "5", "--alpha", "2", "--beta", "0", "--psi0", "0.5", "--dpsi0", "-3",
        "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,psi,psi_t,psi_tt\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hits_zero"));
}

#[test]
fn physical_frame_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let out = radsing(&[
        "simulate", "--n", "4", "--alpha", "2.5", "--beta", "-1", "--psi0", "1.5", "--T", "30",
        "--frame", "physical", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["frame"], "physical");
    assert!(v["flux_defect"].as_f64().unwrap() < 1e-6);
    assert!(fs::read_to_string(csv).unwrap().starts_with("r,u,u_r,u_rr"));
}

#[test]
fn classify_equilibrium() {
    let out = radsing(&["classify", "--n", "5", "--alpha", "2", "--beta", "0", "--psi0", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"], "converges_to_a");
    assert_eq!(v["A"], 2.0);
}

#[test]
fn separatrix_payload() {
    let out = radsing(&[
        "separatrix", "--n", "5", "--alpha", "2", "--beta", "0", "--t0", "5", "--psi0", "0.5",
        "--lo", "-5", "--hi", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let slope = v["separatrix"]["slope"].as_f64().unwrap();
    assert!(slope > -5.0 && slope < 5.0);
    assert!(v["rate_relative_error"].as_f64().unwrap() < 5e-2);

    let out = radsing(&[
        "separatrix", "--n", "5", "--alpha", "2", "--beta", "0", "--psi0", "0.5", "--lo", "0",
        "--hi", "1", "--fit", "false",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "ensemble = 4\nseed = 11\nhorizon = 120\n\n[grid]\nn = [4, 5]\nalpha_fractions = [0.5]\nbeta = [0.0, 1.0]\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let one = radsing(&["sweep", "--config", c, "--jobs", "1"]);
    let two = radsing(&["sweep", "--config", c, "--jobs", "3"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    let v = json(&one);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    assert_eq!(v["seed"], 11);

    let csv_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_radsing"))
        .args(["sweep", "--config", c, "--ensemble", "1", "--csv-dir", "traj"])
        .env("RADSING_OUTPUT_DIR", &csv_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ensemble"], 1);
    assert_eq!(fs::read_dir(csv_dir.join("traj")).unwrap().count(), 4);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(radsing(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(radsing(&["simulate", "--n", "5", "--alpha", "2", "--beta", "0"]).status.code(), Some(2));
    assert_eq!(radsing(&["verify", "--grid", "huge"]).status.code(), Some(2));
    let help = radsing(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}
