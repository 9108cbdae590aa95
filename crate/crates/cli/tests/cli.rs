use std::process::{Command, Output};

use logbesov::gallery::make_exponential;
use logbesov::GridSpec;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logbesov")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

#[test]
fn partition_check_passes_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dpu");
    let out = run(&["--grid", "J=10", "partition-check", "--export", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["k_max"], 8);
    let p = logbesov::io::read_dpu(&path).unwrap();
    assert_eq!(p.k_max(), 8);
}

#[test]
fn norm_of_an_exponential() {
    let out = run(&["--grid", "J=11", "norm", "--f", "exp:m=5", "--b", "2", "--p", "inf", "--q", "inf"]);
    assert_eq!(out.status.code(), Some(0));
    let value = json(&out)["value"].as_f64().unwrap();
    assert!((value - 36.0).abs() < 1e-9, "{value}");
}

#[test]
fn norm_of_a_stored_function() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.sfn");
    let grid = GridSpec::new(1, 10).unwrap();
    logbesov::io::write_sfn(&path, &make_exponential(grid, [16, 0]).unwrap()).unwrap();
    let out = run(&["--grid", "J=10", "norm", "--input", path.to_str().unwrap(), "--b", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let value = json(&out)["value"].as_f64().unwrap();
    assert!((value - 0.2).abs() < 1e-12);
    // the file's own grid takes precedence over --grid
    let other = run(&["--grid", "J=12", "norm", "--input", path.to_str().unwrap(), "--b", "-1"]);
    assert_eq!(json(&other)["value"], json(&out)["value"]);
    let spec = format!("file:{}", path.display());
    assert_eq!(run(&["--grid", "J=11", "norm", "--f", &spec]).status.code(), Some(2));
}

#[test]
fn criteria_report_for_an_exponential() {
    let out = run(&["--grid", "J=10", "criteria", "--f", "exp:m=4", "--p", "1", "--b", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["verdict"].is_string());
    assert_eq!(v["divergent"]["term2"], false);
}

#[test]
fn bad_input_is_an_error() {
    assert_eq!(run(&["norm", "--f", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["norm"]).status.code(), Some(2));
    assert_eq!(run(&["--grid", "J=3", "partition-check"]).status.code(), Some(2));
}

#[test]
fn growth_sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--grid",
        "J=11",
        "--out",
        dir.path().to_str().unwrap(),
        "exp-growth",
        "--p-list",
        "1",
        "--b-list",
        "-2,2",
        "--m-range",
        "3-7",
    ]);
    assert!(matches!(out.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().any(|n| n.ends_with("_rows.csv")), "{names:?}");
    assert!(names.iter().any(|n| n.ends_with("_summary.csv")), "{names:?}");
}
