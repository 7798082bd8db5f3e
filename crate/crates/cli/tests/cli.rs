use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn diagflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagflow")).args(args).env_remove("DIAGFLOW_THREADS").output().unwrap()
}

/// Runs a command on a fixture, returning the exit code and the report.
fn run_to(command: &str, cfg: &Path, extra: &[&str], out: &Path) -> (i32, String) {
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = diagflow(&args);
    (o.status.code().unwrap(), std::fs::read_to_string(out).unwrap_or_default())
}

fn run(command: &str, name: &str, extra: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    run_to(command, &fixture(name), extra, &dir.path().join("report"))
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn failed_checks(report: &Value) -> Vec<String> {
    report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| !v["passed"].as_bool().unwrap())
        .map(|v| v["check"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn bundled_fixtures_pass() {
    for name in [
        "identity_tau.toml",
        "sqrt2_roth.toml",
        "sqrt2_omega.toml",
        "shear_capture.toml",
        "identity3_dynamics.toml",
        "sqrt2_scan.toml",
        "sweep_identity.toml",
    ] {
        let (code, out) = run("verify", name, &[]);
        let r = json(&out);
        assert_eq!(code, 0, "{name}: {:?}", failed_checks(&r));
        assert!(!r["verdicts"].as_array().unwrap().is_empty(), "{name}");
    }
}

#[test]
fn corrupted_fixture_fails() {
    let (code, out) = run("verify", "corrupted_capture.toml", &[]);
    assert_eq!(code, 1);
    assert_eq!(failed_checks(&json(&out)), vec!["simulate/flow 0 capture ell=2"]);
}

#[test]
fn validation_errors_exit_two() {
    for name in ["empty.toml", "dimension_mismatch.toml"] {
        let (code, out) = run("verify", name, &[]);
        assert_eq!(code, 2, "{name}");
        assert!(out.is_empty(), "no report is written for {name}");
    }
    // a command whose section is absent
    assert_eq!(run("tau", "shear_capture.toml", &[]).0, 2);
    assert_eq!(diagflow(&["hn"]).status.code(), Some(2));
    assert_eq!(diagflow(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "matrices = [[[1, 0], [0, 1]]]\nunknown_key = 3\n").unwrap();
    assert_eq!(run_to("hn", &bad, &[], &dir.path().join("r")).0, 2);
    std::fs::write(&bad, "matrices = [[[1, 2], [2, 4]]]\n").unwrap();
    assert_eq!(run_to("hn", &bad, &[], &dir.path().join("r")).0, 2);
}

#[test]
fn reports_are_byte_identical() {
    for (cmd, name) in [("simulate", "sqrt2_roth.toml"), ("sweep", "sweep_identity.toml"), ("scan", "sqrt2_scan.toml")] {
        for format in ["json", "csv"] {
            let a = run(cmd, name, &["--format", format]);
            let b = run(cmd, name, &["--format", format, "--threads", "2"]);
            assert_eq!(a.0, 0);
            assert_eq!(a, b, "{cmd} {name} {format}");
        }
    }
}

#[test]
fn report_reproduces_from_its_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, first) = run_to("hn", &fixture("sqrt2_roth.toml"), &["--seed", "5", "--precision-margin", "40"], &dir.path().join("a"));
    assert_eq!(code, 0);
    let r = json(&first);
    assert_eq!(r["inputs"]["seed"], 5);
    assert_eq!(r["inputs"]["precision_margin"], 40);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    let cfg = dir.path().join("replay.toml");
    std::fs::write(&cfg, r["inputs"]["config"].as_str().unwrap()).unwrap();
    let (_, second) = run_to("hn", &cfg, &["--seed", "5", "--precision-margin", "40"], &dir.path().join("b"));
    assert_eq!(first, second);
    let (_, other) = run_to("hn", &cfg, &["--seed", "6", "--precision-margin", "40"], &dir.path().join("c"));
    assert_ne!(json(&other)["inputs_digest"], r["inputs_digest"]);
}

#[test]
fn seed_drives_random_flows() {
    let a = json(&run("sweep", "sweep_identity.toml", &[]).1);
    let b = json(&run("sweep", "sweep_identity.toml", &["--seed", "7"]).1);
    let c = json(&run("sweep", "sweep_identity.toml", &["--seed", "8"]).1);
    // seed = 7 in the config
    assert_eq!(a["results"], b["results"]);
    assert_ne!(a["results"]["records"], c["results"]["records"]);
}

#[test]
fn csv_columns() {
    let (code, out) = run("tau", "identity_tau.toml", &["--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "section,path,value");
    assert_eq!(lines[1], "meta,command,tau");
    assert!(lines.contains(&"result,values/0/family,-1"));
    assert!(lines.contains(&"verdict,formulas agree,pass"));
}

#[test]
fn threads_flag_overrides_environment() {
    let cfg = fixture("identity_tau.toml");
    let base = [cfg.to_str().unwrap()];
    let bad_env = Command::new(env!("CARGO_BIN_EXE_diagflow"))
        .args(["tau", "--config", base[0]])
        .env("DIAGFLOW_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
    let flagged = Command::new(env!("CARGO_BIN_EXE_diagflow"))
        .args(["tau", "--config", base[0], "--threads", "1"])
        .env("DIAGFLOW_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(flagged.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&flagged.stderr).contains("wall time"));
}

#[test]
fn command_results() {
    let r = json(&run("tau", "identity_tau.toml", &[]).1);
    let fams: Vec<&str> = r["results"]["values"].as_array().unwrap().iter().map(|v| v["family"].as_str().unwrap()).collect();
    assert_eq!(fams, vec!["-1", "1", "0"]);

    let r = json(&run("hn", "shear_capture.toml", &[]).1);
    let f = &r["results"]["filtrations"][0];
    assert_eq!(f["semistable"], false);
    assert_eq!(f["filtration"]["chain"][1]["basis"], serde_json::json!([["1", "-1"]]));

    let r = json(&run("exponents", "sqrt2_omega.toml", &[]).1);
    assert_eq!(r["results"]["omega"]["value"], "1");
    assert_eq!(r["results"]["omega"]["witness"]["v"], serde_json::json!(["7", "5"]));

    let (code, out) = run("simulate", "identity3_dynamics.toml", &[]);
    assert_eq!(code, 0);
    let series = &json(&out)["results"]["runs"][0]["series"];
    let last = series.as_array().unwrap().last().unwrap();
    let logs: Vec<f64> = last["log_minima_over_t"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in logs.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn acceptance_suite_through_verify() {
    let (code, out) = run("verify", "acceptance.toml", &[]);
    let r = json(&out);
    let rows: Vec<&Value> = r["verdicts"].as_array().unwrap().iter().filter(|v| v["check"].as_str().unwrap().starts_with("acceptance/")).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(code, 0, "{:?}", failed_checks(&r));
}
