//! End-to-end tests of the `varbergman` binary: exit codes, report files,
//! and byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_varbergman"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn verify_subset_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(
        &file,
        r#"{
            "dimension": 1,
            "resolution": {"radial": 100, "angular": 64},
            "verify": {"checks": [{"name": "mobius_identity", "samples": 500}]}
        }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["verify", "--scenario"])
        .arg(&file)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"mobius_identity\""));
    assert!(report.contains("\"pass\": true"));
    // The report re-parses as JSON and the float format round-trips.
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["command"], "verify");
}

#[test]
fn unresolved_reference_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(
        &file,
        r#"{"dimension": 1, "norm": {"function": "ghost"}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["norm", "--scenario"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ghost"), "stderr: {err}");
}

#[test]
fn malformed_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(&file, "{ not json").unwrap();
    let out = bin()
        .args(["norm", "--scenario"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_assertion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(
        &file,
        r#"{
            "dimension": 1,
            "resolution": {"radial": 150, "angular": 128},
            "exponent": {"kind": "constant", "value": 2.0},
            "functions": {"f": {"kind": "monomial", "var": 0, "power": 1, "coeff": [1.0, 0.0]}},
            "norm": {"function": "f", "expect_norm": 3.0, "rel_tol": 1e-6}
        }"#,
    )
    .unwrap();
    let out = bin()
        .args(["norm", "--scenario"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("check failed"), "stderr: {err}");
}

#[test]
fn shipped_symbol_divergence_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["wco", "--scenario"])
        .arg(scenario("symbol-divergence.json"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"divergence_flag\": true"));
    let shells = std::fs::read_to_string(dir.path().join("shells.csv")).unwrap();
    assert!(shells.starts_with("shell_index,one_minus_a,max_ratio,flag\n"));
    assert!(shells.lines().count() > 3);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = bin()
            .args(["norm", "--scenario"])
            .arg(scenario("norm-basic.json"))
            .args(["--seed", "11"])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let ra = std::fs::read(a.join("report.json")).unwrap();
    let rb = std::fs::read(b.join("report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn resolution_override_is_reflected_in_output() {
    let out1 = bin()
        .args(["norm", "--scenario"])
        .arg(scenario("norm-basic.json"))
        .args(["--resolution", "150x128"])
        .output()
        .unwrap();
    let out2 = bin()
        .args(["norm", "--scenario"])
        .arg(scenario("norm-basic.json"))
        .output()
        .unwrap();
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(out2.status.code(), Some(0));
    // Different quadrature, slightly different norm digits.
    assert_ne!(out1.stdout, out2.stdout);
    let bad = bin()
        .args(["norm", "--scenario"])
        .arg(scenario("norm-basic.json"))
        .args(["--resolution", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
