//! End-to-end checks of the binary: scenario execution, report shape,
//! determinism, schema rejection, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_scenario(name: &str, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kisin"))
        .arg("run")
        .arg(scenario_dir().join(name))
        .args(extra)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is valid JSON")
}

#[test]
fn models_task_reports_unique_model() {
    let out = run_scenario("models_unique.json", &[]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["task"], "models");
    assert_eq!(report["results"]["model_count"], 1);
    assert_eq!(report["results"]["c1"], true);
    assert_eq!(report["results"]["models"][0], serde_json::json!([[1, 2]]));
}

#[test]
fn pls_task_separates_the_frozen_pair() {
    let out = run_scenario("pls_counterexample.json", &[]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    // three singleton models for this character list; the two frozen ones
    // sit in different components
    assert_eq!(report["results"]["component_count"], 3);
    let components = report["results"]["components"].as_array().unwrap();
    let frozen_a = serde_json::json!([[1, 1], [4, 5], [0, 0], [5, 4]]);
    let frozen_b = serde_json::json!([[5, 5], [0, 1], [4, 4], [1, 0]]);
    let index_of = |m: &serde_json::Value| {
        components
            .iter()
            .position(|c| c.as_array().unwrap().contains(m))
            .expect("frozen model present")
    };
    assert_ne!(index_of(&frozen_a), index_of(&frozen_b));
}

#[test]
fn shape_verify_task_reports_no_counterexamples() {
    let out = run_scenario("shape_verify_f3.json", &[]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["results"]["counterexamples"], serde_json::json!([]));
    assert_eq!(report["results"]["cases_examined"], 9 * 48);
}

#[test]
fn conditions_task_reports_the_gate() {
    let out = run_scenario("conditions_gate.json", &[]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let results = &report["results"];
    assert_eq!(results["c1"], true);
    assert_eq!(results["c2a"], true);
    assert_eq!(results["theorem_main_gate"], true);
    assert_eq!(results["corollary_cases"], serde_json::json!([1, 4]));
    assert_eq!(results["serre_weight_ok"], true);
}

#[test]
fn ext_task_reports_dimension_and_bound() {
    let out = run_scenario("ext_dimension.json", &[]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let results = &report["results"];
    assert_eq!(results["dimension"], 1);
    assert_eq!(results["d_nek"], 1);
    assert_eq!(results["bound_holds"], true);
    assert_eq!(results["height_ok"], true);
    assert_eq!(results["stability"]["dim_base"], results["stability"]["dim_doubled"]);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let first = run_scenario("pls_counterexample.json", &["--seed", "7"]);
    let second = run_scenario("pls_counterexample.json", &["--seed", "7"]);
    assert!(first.status.success() && second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "params": { "p": 3, "f": 1, "m": 1, "n": 8 },
  "task": "models",
  "payload": { "chars": [], "template": [[0]], "surprise": true }
}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .arg("run")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("payload"), "stderr: {stderr}");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v2.json");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 2,
  "params": { "p": 3, "f": 1, "m": 1, "n": 8 },
  "task": "models",
  "payload": { "chars": [], "template": [[0]] }
}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .arg("run")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_profile_passes_vacuously() {
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .args(["sweep", "--profile", "none"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["results"]["all_pass"], true);
    assert_eq!(report["results"]["suites"], serde_json::json!([]));
}

#[test]
fn ext_c_target_solvability_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ext_target.json");
    // sub A = (u^2), quot A' = (1): a constant block is hit by the
    // fixed-point witness, so it is equivalent to zero
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "params": { "p": 3, "f": 1, "m": 1, "n": 12 },
  "task": "ext",
  "payload": {
    "sub": { "t": [[2]], "units": [[1]] },
    "quot": { "t": [[0]], "units": [[1]] },
    "shape_tag": "ext-shape",
    "c_target": [{ "s": 0, "i": 0, "j": 0, "coeffs": [[2]] }]
  }
}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .arg("run")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["c_target_trivial"], true);
}

#[test]
fn selftest_profile_exits_with_findings() {
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .args(["sweep", "--profile", "selftest-fail"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["all_pass"], false);
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run_scenario("models_unique.json", &["--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["results"]["c1"], true);
}

#[test]
fn params_flag_overrides_the_scenario_block() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.json");
    // invalid override: f does not divide m
    std::fs::write(&path, r#"{ "p": 3, "f": 2, "m": 3, "n": 8 }"#).unwrap();
    let out = run_scenario("models_unique.json", &["--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // valid override equal to the embedded block succeeds
    std::fs::write(&path, r#"{ "p": 3, "f": 2, "m": 2, "n": 8 }"#).unwrap();
    let out = run_scenario("models_unique.json", &["--params", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn sweep_budget_exhaustion_is_inconclusive_not_fatal() {
    let out = Command::new(env!("CARGO_BIN_EXE_kisin"))
        .args(["sweep", "--profile", "desk", "--budget", "1000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "budget exhaustion must not fail the sweep");
    let report = stdout_json(&out);
    assert_eq!(report["results"]["inconclusive"], true);
    assert_eq!(report["results"]["all_pass"], false);
}

/// The full desk sweep through the scenario interface: every registered
/// suite passes.
#[test]
fn desk_sweep_scenario_passes() {
    let out = run_scenario("sweep_desk.json", &[]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["results"]["all_pass"], true);
    assert_eq!(report["results"]["suites"].as_array().unwrap().len(), 10);
}
