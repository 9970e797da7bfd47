//! End-to-end checks of the `qmetric` binary: outputs, formats and exit codes.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmetric"))
        .args(args)
        .env_remove("QMETRIC_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn bell_files(dir: &TempDir) -> (PathBuf, PathBuf) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = |s: f64| json!({"dim": 4, "dimA": 2, "dimB": 2, "amplitudes": [[h, 0.0], [0.0, 0.0], [0.0, 0.0], [s * h, 0.0]]});
    (write(dir.path(), "phi_plus.json", &bell(1.0)), write(dir.path(), "phi_minus.json", &bell(-1.0)))
}

fn stats(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON on stdout");
    v["records"][0]["statistics"].clone()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn dist_on_bell_states() {
    let dir = TempDir::new().unwrap();
    let (a, b) = bell_files(&dir);
    let out = qmetric(&["dist", p(&a), p(&b)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = stats(&out);
    assert!((s["fs"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-12);
    assert!((s["entanglement"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-12);
    assert!((s["bures"].as_f64().unwrap() - SQRT_2).abs() < 1e-12);
    assert!(s["deltaE"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(s["overlap"].as_f64().unwrap(), 0.0);
}

#[test]
fn dist_identical_and_orthogonal() {
    let dir = TempDir::new().unwrap();
    let zero = write(dir.path(), "0.json", &json!({"dim": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}));
    let one = write(dir.path(), "1.json", &json!({"dim": 2, "amplitudes": [[0.0, 0.0], [1.0, 0.0]]}));
    let same = stats(&qmetric(&["dist", p(&zero), p(&zero), "--which", "fs,bures,trace,hilbert"]));
    for k in ["fs", "bures", "trace", "hilbert"] {
        assert_eq!(same[k].as_f64().unwrap(), 0.0, "{k}");
    }
    let orth = stats(&qmetric(&["dist", p(&zero), p(&one), "--which", "trace"]));
    assert!((orth["trace"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert!(orth.get("fs").is_none());
}

#[test]
fn entanglement_without_factors_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", &json!({"dim": 4, "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}));
    let out = qmetric(&["dist", p(&a), p(&a), "--which", "entanglement"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimA"));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", &json!({"dim": 3, "amplitudes": [[1.0, 0.0]]}));
    let zero = write(dir.path(), "z.json", &json!({"dim": 2, "amplitudes": [[0.0, 0.0], [0.0, 0.0]]}));
    let ok = write(dir.path(), "ok.json", &json!({"dim": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}));
    let missing = dir.path().join("missing.json");
    for args in [
        vec!["dist", p(&bad), p(&ok)],
        vec!["dist", p(&zero), p(&ok)],
        vec!["dist", p(&missing), p(&ok)],
        vec!["dist", p(&ok), p(&ok), "--which", "euclid"],
        vec!["axioms", "nonsense"],
        vec!["axioms", "entanglement", "--factors", "2by2"],
        vec!["qfi", "--family", "qutrit"],
        vec!["qfi", "--step", "0.5"],
        vec!["inequalities", "--samples", "0"],
        vec!["concentration", "--dims", "1"],
        vec!["frobnicate"],
    ] {
        let out = qmetric(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = qmetric(&["dist", p(&bad), p(&ok)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitudes"));
}

#[test]
fn axioms_exit_codes_follow_claims() {
    let fs = qmetric(&["axioms", "fs", "--samples", "200"]);
    assert_eq!(fs.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&fs.stdout).unwrap();
    assert!(report["flags"].as_array().unwrap().contains(&json!("QuantumInspiredMetric")));

    let hilbert = qmetric(&["axioms", "hilbert", "--samples", "200"]);
    assert_eq!(hilbert.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&hilbert.stdout).unwrap();
    let ray = &report["verdicts"][0];
    assert_eq!(ray["axiom"], "Ray");
    assert_eq!(ray["status"], "Fail");
    assert!((ray["maxViolation"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    // Bures does not claim geodesic additivity, so its failure there is not an error.
    let bures = qmetric(&["axioms", "bures", "--samples", "200"]);
    assert_eq!(bures.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&bures.stdout).unwrap();
    assert_eq!(report["unclaimedFailures"], json!(["GeodesicAdditivity"]));
}

#[test]
fn axioms_with_povm_file() {
    let dir = TempDir::new().unwrap();
    let z = [0.0, 0.0];
    let povm = write(
        dir.path(),
        "basis.json",
        &json!({"dim": 2, "effects": [[[[1.0, 0.0], z], [z, z]], [[z, z], [z, [1.0, 0.0]]]]}),
    );
    let out = qmetric(&["axioms", &format!("measurement:{}", p(&povm)), "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let status = |name: &str| {
        report["verdicts"].as_array().unwrap().iter().find(|v| v["axiom"] == name).unwrap()["status"].clone()
    };
    assert_eq!(status("NonDegeneracy"), "Fail");
    assert_eq!(status("MeasurementContextuality"), "Pass");
}

#[test]
fn discriminate_and_qfi() {
    let dir = TempDir::new().unwrap();
    let t = std::f64::consts::FRAC_PI_6;
    let a = write(dir.path(), "a.json", &json!({"dim": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}));
    let b = write(dir.path(), "b.json", &json!({"dim": 2, "amplitudes": [[t.cos(), 0.0], [t.sin(), 0.0]]}));
    let out = qmetric(&["discriminate", p(&a), p(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let s = stats(&out);
    assert!((s["pSuccess"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    let out = qmetric(&["qfi", "--family", "qubit-rotation", "--theta", "-0.7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stats(&out)["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let out = qmetric(&["qfi", "--family", "constant"]);
    assert_eq!(stats(&out)["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn csv_output_and_out_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("conc.csv");
    let out = qmetric(&["concentration", "--dims", "2,8", "--samples", "2000", "--format", "csv", "--out", p(&path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,dim,key,value,verdict"));
    let row = text.lines().find(|l| l.starts_with("concentration,2,meanR2,")).unwrap();
    let v: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((v - 0.5).abs() < 0.01);
}

#[test]
fn seed_falls_back_to_environment() {
    let args = ["inequalities", "--dims", "2", "--samples", "300"];
    let flag = qmetric(&[&args[..], &["--seed", "9"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_qmetric")).args(args).env("QMETRIC_SEED", "9").output().unwrap();
    let default = qmetric(&args);
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, default.stdout);
    let v: Value = serde_json::from_slice(&default.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 42);
}
