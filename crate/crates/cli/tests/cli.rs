//! End-to-end tests of the `dgalab` binary: golden reports, schema, exit codes.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under tests/golden.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixtures() -> PathBuf {
    root().join("../core/fixtures")
}

fn data() -> PathBuf {
    root().join("tests/data")
}

/// Runs the binary inside `dir` so paths in reports stay relative.
fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dgalab"));
    cmd.current_dir(dir).args(args).env_remove("DGALAB_HEIGHT_BOUND");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(root().join("schema/report.schema.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(report) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("report violates schema: {msgs:?}\n{report:#}");
}

fn json_report(dir: &Path, args: &[&str], expect: i32) -> (Value, String) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run_in(dir, &full, &[]);
    let stdout = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(code(&o), expect, "{args:?}\nstdout:\n{stdout}\nstderr:\n{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout).expect("stdout is JSON");
    assert_eq!(v["exit_code"], expect);
    assert_valid(&v);
    (v, stdout)
}

fn golden(name: &str, actual: &str) {
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "output differs from {name}");
}

#[test]
fn fixture_reports_match_goldens() {
    for f in ["a1", "a2", "a3", "a4"] {
        let file = format!("{f}.dga");
        for cmd in ["check", "poincare", "intersection", "inflexible", "homotopy"] {
            let (_, out) = json_report(&fixtures(), &[cmd, &file], 0);
            golden(&format!("{f}_{cmd}.json"), &out);
        }
    }
}

#[test]
fn text_output_matches_golden() {
    let o = run_in(&fixtures(), &["inflexible", "a1.dga"], &[]);
    assert_eq!(code(&o), 0);
    golden("a1_inflexible.txt", &String::from_utf8(o.stdout).unwrap());
    let o = run_in(&fixtures(), &["intersection", "a1.dga"], &[]);
    golden("a1_intersection.txt", &String::from_utf8(o.stdout).unwrap());
}

#[test]
fn a1_intersection_matrix() {
    let (v, _) = json_report(&fixtures(), &["intersection", "a1.dga"], 0);
    let m: Vec<Vec<String>> = serde_json::from_value(v["payload"]["matrix"].clone()).unwrap();
    let expect = [["0", "0", "0", "-1"], ["0", "0", "1", "0"], ["0", "1", "0", "0"], ["-1", "0", "0", "1"]];
    assert_eq!(m, expect.map(|r| r.map(String::from).to_vec()).to_vec());
    assert_eq!(v["payload"]["lagrangian_verified"], true);
    let digest = v["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn scaled_fundamental_class() {
    for s in ["1/2", "3"] {
        let (v, _) = json_report(&fixtures(), &["intersection", "a2.dga", "--scale", s], 0);
        assert_eq!(v["payload"]["condition_witt"], "yes");
    }
    json_report(&fixtures(), &["intersection", "a2.dga", "--scale", "0"], 3);
}

#[test]
fn a4_middle_cohomology_vanishes() {
    let (v, out) = json_report(&fixtures(), &["cohom", "a4.dga", "--degree", "114"], 0);
    assert_eq!(v["payload"]["degrees"][0]["dimension"], 0);
    golden("a4_cohom_114.json", &out);
}

#[test]
fn class_reports_witness() {
    let (v, out) = json_report(&fixtures(), &["class", "a1.dga", "--expr", "x1^19"], 0);
    assert_eq!(v["payload"]["exact"], true);
    assert!(v["payload"]["witness"].is_string());
    golden("a1_class_x1_19.json", &out);
    let (v, _) = json_report(&fixtures(), &["class", "a1.dga", "--expr", "x2^16"], 0);
    assert_eq!(v["payload"]["exact"], false);
}

#[test]
fn property_failures_exit_one() {
    let (v, _) = json_report(&data(), &["intersection", "cp2.dga"], 1);
    assert_eq!(v["payload"]["signature"], 1);
    json_report(&data(), &["poincare", "free.dga"], 1);
}

#[test]
fn inconclusive_exits_two() {
    let (v, _) = json_report(&fixtures(), &["inflexible", "s2.dga"], 2);
    assert_eq!(v["verdict"], "inconclusive");
}

#[test]
fn input_errors_exit_three() {
    let (v, _) = json_report(&data(), &["check", "bad_degree.dga"], 3);
    assert!(v["error"].as_str().unwrap().contains("line 4"));
    json_report(&data(), &["check", "missing.dga"], 3);
    json_report(&data(), &["degsets", "conflict.catalog"], 3);
    json_report(&fixtures(), &["class", "a1.dga", "--expr", "y1"], 3);
    json_report(&fixtures(), &["cohom", "a1.dga"], 3);
    json_report(&data(), &["poincare", "bad_degree.dga"], 3);
    assert_eq!(code(&run_in(&data(), &["bogus"], &[])), 3);
    let o = run_in(&fixtures(), &["intersection", "a1.dga"], &[("DGALAB_HEIGHT_BOUND", "lots")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn height_bound_from_environment() {
    let o = run_in(&fixtures(), &["--json", "intersection", "a1.dga"], &[("DGALAB_HEIGHT_BOUND", "3")]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["payload"]["height_bound"], 3);
}

#[test]
fn degsets_catalog() {
    let (v, out) = json_report(&data(), &["degsets", "sum.catalog"], 0);
    let infl: Vec<String> = serde_json::from_value(v["payload"]["inflexible"].clone()).unwrap();
    assert!(infl.contains(&"M#N".to_string()));
    assert!(v["payload"]["derived"].as_array().unwrap().iter().all(|d| d["replayed"] == true));
    golden("sum_degsets.json", &out);
}

#[test]
fn tensor_roundtrip_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a3a3.dga");
    let a3 = fixtures().join("a3.dga");
    let a3 = a3.to_str().unwrap();
    let o = run_in(dir.path(), &["tensor", a3, a3, "-o", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0);
    let (v, _) = json_report(dir.path(), &["check", "a3a3.dga"], 0);
    assert_eq!(v["payload"]["formal_dimension"], 416);
    let trace = dir.path().join("tree.json");
    let (v, _) = json_report(dir.path(), &["inflexible", "a3a3.dga", "--trace", trace.to_str().unwrap()], 0);
    assert!(v["payload"]["rules_used"].as_array().unwrap().iter().any(|r| r == "R-support"));
    let tree: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(tree["children"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn sequential_and_parallel_agree() {
    let (a, _) = json_report(&fixtures(), &["inflexible", "a4.dga"], 0);
    let (b, _) = json_report(&fixtures(), &["--sequential", "inflexible", "a4.dga"], 0);
    assert_eq!(a, b);
}
