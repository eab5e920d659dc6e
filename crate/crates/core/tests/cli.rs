//! End-to-end runs of the `fermisig` binary.

use std::path::Path;
use std::process::{Command, Output};

const TRIANGLE: &str = r#"{
  "schema_version": 1,
  "kind": "graph",
  "b": 1.0,
  "upper": "min(x, 1 - x)",
  "lower": { "xs": [0.0, 1.0], "ts": [0.0, 0.0] }
}"#;

const DIAMONDS: &str = r#"{
  "schema_version": 1,
  "kind": "simple",
  "breakpoints": [0.0, 0.4, 1.0],
  "incidence": [[true, true], [false, true]]
}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermisig")).current_dir(dir).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    std::fs::write(dir.join(name), body).unwrap();
    name.to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn spectrum_writes_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "tri.json", TRIANGLE);
    let o = run(dir.path(), &["spectrum", "--spec", &spec, "--n", "32", "--out", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "spectrum.csv", "spectrum.svg"] {
        assert!(dir.path().join("out").join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,value"));
    assert_eq!(lines.count(), 64);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "spectrum");
    assert_eq!(report["inputs"]["spec"]["kind"], "graph");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "d.json", DIAMONDS);
    for out in ["a", "b"] {
        let o = run(dir.path(), &["traces", "--spec", &spec, "--samples", "5000", "--seed", "7", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["report.json", "spectrum.csv", "spectrum.svg"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn verify_passes_on_the_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "tri.json", TRIANGLE);
    let o = run(dir.path(), &["verify", "--spec", &spec, "--samples", "20000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS")));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn reconstruct_draws_the_density() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "tri.json", TRIANGLE);
    let o = run(dir.path(), &["reconstruct", "--spec", &spec, "--n", "128", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let svg = std::fs::read_to_string(dir.path().join("fermisig-out/density.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(!dir.path().join("fermisig-out/report.json").exists());
}

#[test]
fn commands_without_a_spectrum_write_an_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["cauchy", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("fermisig-out/spectrum.csv")).unwrap();
    assert_eq!(csv.trim_end(), "index,value");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", TRIANGLE);
    let bad_json = write(dir.path(), "bad.json", "{ \"schema_version\": 1, ");
    let bad_version = write(dir.path(), "v2.json", &TRIANGLE.replace("\"schema_version\": 1", "\"schema_version\": 2"));
    let timelike = write(
        dir.path(),
        "tl.json",
        &TRIANGLE.replace("min(x, 1 - x)", "min(2*x, 1 - x)"),
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--spec", "missing.json"],
        vec!["spectrum", "--spec", &bad_json],
        vec!["spectrum", "--spec", &bad_version],
        vec!["spectrum", "--spec", &timelike],
        vec!["spectrum", "--simple", &tri],
        vec!["spectrum"],
        vec!["reconstruct", "--spec", &tri, "--window", "1"],
        vec!["bogus"],
        vec!["spectrum", "--spec", &tri, "--n", "many"],
    ];
    for args in cases {
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // the isospectral pair differs in spacelike length by far less than required
    let o = run(dir.path(), &["isospectral", "--delta", "0.01", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}
