use std::process::{Command, Output};

fn hartogs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hartogs"))
        .args(args)
        .env_remove("HARTOGS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn selftest_passes() {
    let o = hartogs(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("overall: PASS"));
}

#[test]
fn dim2_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dim2.json");
    let o = hartogs(&["dim2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["overall"], "pass");
}

#[test]
fn failed_check_exits_with_one() {
    let o = hartogs(&["dim2", "--debug-cocycle", "1,1"]);
    assert_eq!(code(&o), 1);
    let o = hartogs(&["dim2", "--debug-scale", "full", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overall"], "fail");
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(code(&hartogs(&["dimn", "--n", "1"])), 2);
    assert_eq!(code(&hartogs(&["dim2", "--r", "2"])), 2);
    assert_eq!(code(&hartogs(&["dimn", "--safety", "2"])), 2);
}

#[test]
fn unwritable_output_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no").join("such").join("r.json");
    let o = hartogs(&["selftest", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hartogs"))
        .args(["selftest", "--format", "text"])
        .env("HARTOGS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("selftest.txt")).unwrap();
    assert!(text.contains("selftest.smith"));
}

#[test]
fn cohomology_torus_table() {
    let o = hartogs(&["cohomology-torus", "--n", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ranks: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, vec![1, 2, 1]);
}

#[test]
fn hessian_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = hartogs(&["hessian-scan", "--samples", "200", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert!(csv.starts_with("modulus,det,positive_definite,in_window"));
}

#[test]
fn identical_runs_give_identical_reports() {
    let a = hartogs(&["dim2", "--format", "json", "--seed", "11"]);
    let b = hartogs(&["dim2", "--format", "json", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
