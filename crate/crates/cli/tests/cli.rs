//! End-to-end behaviour of the `coxspec` binary: outputs, exit codes and the
//! error report on stderr.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn coxspec(args: &[&str], model: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxspec"))
        .args(args)
        .arg("--model")
        .arg(model)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn error_report(o: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let last = stderr.lines().last().expect("stderr not empty");
    serde_json::from_str(last).expect("error report is JSON")
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(coxspec(&["analyze"], &fixture("bound3.json"), &a).status.success());
    assert!(coxspec(&["analyze"], &fixture("bound3.json"), &b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["curves", "perturb", "potential", "scatter"] {
        let a = dir.path().join(format!("{cmd}.a.csv"));
        let b = dir.path().join(format!("{cmd}.b.csv"));
        assert!(coxspec(&[cmd], &fixture("feshbach.json"), &a).status.success(), "{cmd}");
        assert!(coxspec(&[cmd], &fixture("feshbach.json"), &b).status.success(), "{cmd}");
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
}

#[test]
fn duplicate_thresholds_exit_one_with_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = coxspec(&["analyze"], &fixture("duplicate_thresholds.json"), &out);
    assert_eq!(o.status.code(), Some(1));
    let report = error_report(&o);
    assert_eq!(report["error"], "invalid_input");
    assert!(!report["violations"].as_array().unwrap().is_empty());
    assert!(!out.exists());
}

#[test]
fn unknown_model_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    std::fs::write(
        &model,
        r#"{"n": 1, "thresholds": [0], "alpha": [1], "beta": [], "factorization_energy": -1, "mass": 2}"#,
    )
    .unwrap();
    let o = coxspec(&["analyze"], &model, &dir.path().join("x.json"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_report(&o)["error"], "json");
}

#[test]
fn bad_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    for tol in ["polish=-1", "nonsense=1e-3", "polish"] {
        let o = coxspec(&["analyze", "--tol", tol], &fixture("virtual3.json"), &out);
        assert_eq!(o.status.code(), Some(1), "{tol}");
    }
    let o = coxspec(&["analyze", "--tol", "polish=1e-8"], &fixture("virtual3.json"), &out);
    assert!(o.status.success());
}

#[test]
fn irregular_model_warns_for_analyze_and_fails_for_potential() {
    let dir = tempfile::tempdir().unwrap();
    let o = coxspec(&["analyze"], &fixture("irregular.json"), &dir.path().join("a.json"));
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let o = coxspec(&["potential"], &fixture("irregular.json"), &dir.path().join("v.csv"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    // level 1 sits on a companion pole: alpha_2 - i k_2 = 0
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    std::fs::write(
        &model,
        r#"{"n": 2, "thresholds": [0, 3], "alpha": [1, 2], "beta": [[1, 2, 0.1]], "factorization_energy": -9}"#,
    )
    .unwrap();
    let o = coxspec(&["perturb"], &model, &dir.path().join("p.csv"));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_report(&o)["error"], "near_degenerate_denominator");
}

#[test]
fn analyze_reports_tally() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = coxspec(&["analyze"], &fixture("bound3.json"), &out);
    assert!(String::from_utf8_lossy(&o.stdout).contains("bound: 2"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["tally"]["n_b"], 2);
    assert_eq!(v["points"].as_array().unwrap().len(), 12);
}

#[test]
fn curves_single_sheet() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = coxspec(&["curves", "--sheet", "++-", "--grid", "-5:5:101"], &fixture("virtual3.json"), &out);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sheet,kbar1,lambda_1,lambda_2,lambda_3"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r.starts_with("++-,")));

    let o = coxspec(&["curves", "--sheet", "-+"], &fixture("virtual3.json"), &out);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invert2_scenario_from_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    std::fs::write(&input, r#"{"delta": 1, "beta": 0.1, "bound": [0.1, 1.5]}"#).unwrap();
    let out = dir.path().join("inv.json");
    let o = coxspec(&["invert2", "--scenario", "two-bound", "--branch", "upper"], &input, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["scenario"], "two-bound");
    assert!((v["alpha1"].as_f64().unwrap() + 0.112649).abs() < 1e-5);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 4);
}

#[test]
fn invert2_restriction_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    // beta far below sqrt(-k_r p_r)
    std::fs::write(
        &input,
        r#"{"scenario": "resonance-only", "delta": 1, "beta": 1e-4, "resonance": {"er": 0.4, "ei": 0.01}}"#,
    )
    .unwrap();
    let o = coxspec(&["invert2"], &input, &dir.path().join("inv.json"));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_report(&o)["error"], "restriction");
}

#[test]
fn scatter_rows_have_fixed_width() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = coxspec(&["scatter", "--grid", "0.5:1.5:11"], &fixture("feshbach.json"), &out);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let widths: Vec<usize> = text.lines().map(|l| l.split(',').count()).collect();
    assert_eq!(widths[0], 4 + 2 * 4);
    assert!(widths.iter().all(|&w| w == widths[0]));
    // one open channel below the threshold at 1, two above
    let open: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(open.first(), Some(&"1"));
    assert_eq!(open.last(), Some(&"2"));
}

#[test]
fn potential_header_lists_upper_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = coxspec(&["potential", "--grid", "0:10:51"], &fixture("bound3.json"), &out);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("r,V_1_1,V_1_2,V_1_3,V_2_2,V_2_3,V_3_3"));
    assert_eq!(text.lines().count(), 52);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let o = Command::new(env!("CARGO_BIN_EXE_coxspec")).args(["analyze"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_coxspec")).args(["--help"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}
