//! End-to-end runs of the `fluctgeom` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluctgeom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn verify_fluctuation_on_builtin_normal() {
    let o = run(&["verify", "--family", "builtin:normal", "--suite", "fluctuation"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    let reports = doc["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert!(r["residual"].as_f64().unwrap() < 1e-8, "{r}");
    }
    assert_eq!(doc["summary"]["total"], doc["summary"]["passed"]);
}

#[test]
fn verify_entropy_on_inline_uniform() {
    let o = run(&["verify", "--family", r#"{"type":"uniform","lo":0,"hi":1}"#, "--suite", "entropy"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    let intrinsic = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["identity"] == "intrinsic_entropy")
        .expect("intrinsic entropy report");
    assert!((intrinsic["lhs"][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn figure_one_has_zero_chart_at_median() {
    let o = run(&["figure", "--id", "1", "--family", "builtin:mixture"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["p", "s", "I"]);
    let mid = rows.iter().find(|r| r[0] == 0.5).expect("row with p = 0.5");
    assert_eq!(mid[1], 0.0);
}

#[test]
fn figure_two_writes_the_comparison_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2");
    let o = run(&["figure", "--id", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["normal", "mixture", "triangle", "uniform"] {
        let text = std::fs::read_to_string(out.join(format!("figure2_{name}.csv"))).unwrap();
        let (header, rows) = csv(&text);
        assert_eq!(header, ["I", "rho", "omega"]);
        assert_eq!(rows.len(), 401);
    }
}

#[test]
fn geometry_table_columns() {
    let o = run(&["geometry", "--family", "builtin:normal_shifted", "--grid", "2:4:11"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["I", "rho", "eta", "p", "s", "g11", "S", "omega"]);
    assert_eq!(rows.len(), 11);
    // normal(3, 0.5): s = 2(I − 3), g = 4
    for r in &rows {
        assert!((r[4] - 2.0 * (r[0] - 3.0)).abs() < 1e-9);
        assert!((r[5] - 4.0).abs() < 1e-9);
    }
}

#[test]
fn geodesic_and_relaxation_tables() {
    let o = run(&["geodesic", "--family", "builtin:mixture", "--from", "-2.5", "--length", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["t", "I", "s", "S", "Phi"]);
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((last[0] - 3.0).abs() < 1e-12);
    assert!((last[2] - first[2] - 3.0).abs() < 1e-8);

    let o = run(&["geodesic", "--family", "builtin:product_normal", "--from", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["t", "I1", "I2", "s1", "s2", "S", "Phi"]);
    let last = rows.last().unwrap();
    // relaxes onto the mode (0, 1) after the chart distance √(1 + 1/4)
    assert!(last[1].abs() < 1e-6 && (last[2] - 1.0).abs() < 1e-6);
    assert!((last[0] - 1.25f64.sqrt()).abs() < 1e-6);
}

#[test]
fn entropy_report_for_a_product() {
    let o = run(&["entropy", "--family", "builtin:product3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert!((doc["intrinsic"].as_f64().unwrap() - 1.5).abs() < 1e-6);
    assert!((doc["geometric"].as_f64().unwrap() - doc["jaynes"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn reports_are_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&[
            "inference", "--family", "builtin:normal", "--m", "20", "--trials", "300", "--seed", "7", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into()).collect();
    assert_eq!(names.len(), 2, "{names:?}");
}

#[test]
fn failing_checks_exit_one_and_still_write() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&["verify", "--family", "builtin:uniform", "--suite", "boundary", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("identity,subject,residual,tolerance,pass,flags,note\n"));
    assert!(text.contains("non_conforming"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "--family", r#"{"type":"uniform","lo":0,"hi":1,"extra":1}"#][..],
        &["verify", "--family", r#"{"type":"cauchy"}"#],
        &["verify", "--family", "builtin:nope"],
        &["verify", "--family", "builtin:normal", "--suite", "nope"],
        &["verify", "--family", "builtin:normal", "--bogus"],
        &["geometry", "--family", "builtin:product2"],
        &["inference", "--family", "builtin:triangle"],
        &["figure", "--id", "3"],
        &["figure", "--id", "1", "--grid", "10"],
        &["figure", "--id", "2"],
        &["geodesic", "--family", "builtin:uniform", "--from", "2"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!Path::new("nope").exists());
}
