use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const MINIMAL: &str = r#"{
  "version": 1,
  "algebra": [1],
  "correspondence": [[1]],
  "representation": [1],
  "truncation": 6,
  "point": {"kind": "explicit", "matrix": [[[0.5, 0.0]]]},
  "polynomials": [{"kind": "explicit", "coefficients": [[[1.0, 0.0]], [[2.0, 0.0]]]}],
  "checks": ["telescoping", "defect_identity", "theta_column"]
}"#;

fn write(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli_{name}.json"));
    std::fs::write(&path, text).unwrap();
    path
}

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn passing_scenario_exits_zero() {
    let p = write("ok", MINIMAL);
    let out = hardy(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 passed, 0 failed"));
}

#[test]
fn machine_output_is_a_report() {
    let p = write("machine", MINIMAL);
    let out = hardy(&["verify", p.to_str().unwrap(), "--format", "machine", "--truncation", "4"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["environments"][0]["truncation"], 4);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn output_flag_writes_a_file() {
    let p = write("outfile", MINIMAL);
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_report.json");
    let out = hardy(&["verify", p.to_str().unwrap(), "--format", "machine", "--output", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["name"], "scenario/telescoping");
}

#[test]
fn mutation_exits_one() {
    let p = write("mutation", MINIMAL);
    let out = hardy(&["verify", p.to_str().unwrap(), "--mutation", "flip-theta-diagonal"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn tight_tolerance_scale_still_passes_exact_identities() {
    let p = write("scale", MINIMAL);
    assert_eq!(code(&hardy(&["verify", p.to_str().unwrap(), "--tolerance-scale", "1e-3"])), 0);
    assert_eq!(code(&hardy(&["verify", p.to_str().unwrap(), "--tolerance-scale", "-1"])), 2);
}

#[test]
fn point_outside_the_disc_exits_two() {
    let p = write("norm", &MINIMAL.replace("[[[0.5, 0.0]]]", "[[[1.2, 0.0]]]"));
    let out = hardy(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`point`") && err.contains("closed unit disc"), "{err}");
}

#[test]
fn malformed_json_exits_three() {
    let p = write("syntax", "{\n  \"version\": 1,\n  \"algebra\": [1,,]\n}");
    let out = hardy(&["verify", p.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn unknown_fields_are_parse_errors() {
    let p = write("unknown", &MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"colour\": 2,"));
    assert_eq!(code(&hardy(&["verify", p.to_str().unwrap()])), 3);
}

#[test]
fn evaluate_prints_the_scalar_fourier_value() {
    let p = write("evaluate", MINIMAL);
    let out = hardy(&["evaluate", p.to_str().unwrap(), "--left", "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // 1 + 2·0.5 in the 1×1 case.
    assert!((v["fourier"][0][0][0][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["left"].as_array().unwrap().len(), 1);
}

#[test]
fn curvature_reports_the_d_one_ratios() {
    let p = write("curvature", MINIMAL);
    let out = hardy(&["curvature", p.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratios = v["ratios"].as_array().unwrap();
    assert_eq!(ratios.len(), 7);
    for (n, r) in ratios.iter().enumerate() {
        let oracle = (1.0 - 0.25f64.powi(n as i32 + 1)) / (n as f64 + 1.0);
        assert!((r.as_f64().unwrap() - oracle).abs() < 1e-12);
    }
}

#[test]
fn bundled_scenarios_pass() {
    for name in ["scalar.json", "free2.json", "graph.json", "matrix2.json"] {
        let out = hardy(&["verify", &scenario(name)]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn missing_file_is_a_validation_error() {
    assert_eq!(code(&hardy(&["verify", "/nonexistent/scenario.json"])), 2);
}

#[test]
fn quick_suite_passes() {
    let out = hardy(&["verify", "--suite", "quick", "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().len() > 100);
}
