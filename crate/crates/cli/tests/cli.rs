use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_nilgevrey"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (
        output.status.code().unwrap(),
        String::from_utf8_lossy(&output.stdout).into_owned(),
    )
}

fn manifest(out: &Path) -> Vec<Value> {
    let text = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    serde_json::from_str::<Value>(&text)
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

#[test]
fn heisenberg_check_exits_with_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(dir.path(), &["check", "--preset", "heisenberg"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("s = m = 1"), "{stdout}");
    let entries = manifest(dir.path());
    assert_eq!(entries[0]["exit_code"], 2);
    assert_eq!(entries[0]["problem"], "heisenberg");
}

#[test]
fn derive_writes_operator_and_keeps_old_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let (code, stdout) = run(dir.path(), &["derive", "--preset", "engel"]);
        assert_eq!(code, 0, "{stdout}");
        assert!(stdout.contains("commutation oracle: pass"));
    }
    assert!(dir.path().join("operator.json").exists());
    assert!(dir.path().join("operator-2.json").exists());
    assert_eq!(manifest(dir.path()).len(), 2);
}

#[test]
fn gevrey_closed_form_and_vanishing() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(dir.path(), &["gevrey", "--m", "9", "--s", "2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Gevrey order 3.3333"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("gevrey.csv")).unwrap();
    assert!(csv.starts_with("sigma,"));
    let (code, stdout) = run(dir.path(), &["gevrey", "--m", "9", "--s", "2", "--f0", "0"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("vanishes to infinite order"), "{stdout}");
}

#[test]
fn gevrey_pipeline_on_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(dir.path(), &["gevrey", "--preset", "bg"]);
    assert_eq!(code, 0, "{stdout}");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report["pipeline"]["failure"].is_null());
    assert!(report["config"]["solver"]["hg"].is_number());
}

#[test]
fn ode_mode_solves_given_potentials() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run(dir.path(), &["solve", "--qp", "t1^2,1", "--mode", "ode"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("Exponential"), "{stdout}");
}

#[test]
fn bad_input_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(dir.path(), &["solve", "--qp", "t1^^2,1"]);
    assert_eq!(code, 4);
    let (code, _) = run(dir.path(), &["check", "--preset", "no-such-preset"]);
    assert_eq!(code, 4);
    let missing = dir.path().join("missing.json");
    let (code, _) = run(
        dir.path(),
        &["derive", "--input", missing.to_str().unwrap()],
    );
    assert_eq!(code, 4);
}
