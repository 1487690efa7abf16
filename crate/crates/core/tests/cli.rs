use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ghtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghtree")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn gh_on_three_point_spaces() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "x.json", r#"{"labels": ["p","q","r"], "matrix": [[0,1,2],[1,0,1],[2,1,0]]}"#);
    let b = write(&dir, "y.json", r#"{"labels": ["u","v","w"], "matrix": [[0,3,3],[3,0,3],[3,3,0]]}"#);
    let out = ghtree(&["gh", "--a", s(&a), "--b", s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    // Path 1-1-2 against the equilateral 3: every bijection distorts by 2.
    assert_eq!(v["gh"], 1.0);
    assert_eq!(v["witness"], serde_json::json!([["p","u"],["q","v"],["r","w"]]));

    let out = ghtree(&["gh", "--a", s(&a), "--b", s(&b), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("gh,left,right"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn tree_report_segment_example() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t.json", r#"{"vertices": ["a","b"], "edges": [["a","b",10]]}"#);
    let x = write(&dir, "x.json", r#"{"vertices": ["a","b"], "edge_points": [[0, 3]]}"#);
    let out = ghtree(&["tree-report", "--tree", s(&t), "--subset", s(&x)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["d_h"], 3.5);
    assert_eq!(v["u_diam"], 7.0);
    assert_eq!(v["verdict_gh_equals_h"], true);

    let x = write(&dir, "x2.json", r#"{"vertices": ["a"], "edge_points": [[0, 3]]}"#);
    let v = stdout_json(&ghtree(&["tree-report", "--tree", s(&t), "--subset", s(&x)]));
    assert_eq!(v["condition"], "Fails");
    assert_eq!(v["verdict_gh_equals_h"], false);
}

#[test]
fn verify_seed_7_passes() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.csv");
    let out = ghtree(&["verify", "--seed", "7", "--format", "csv", "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")), "{text}");
}

#[test]
fn verify_is_deterministic_apart_from_timing() {
    let strip = |out: Output| {
        let mut v = stdout_json(&out);
        v.as_object_mut().unwrap().remove("total_runtime_ms");
        for r in v["records"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("runtime_ms");
        }
        v
    };
    let a = strip(ghtree(&["verify", "--seed", "11", "--trials", "10"]));
    let b = strip(ghtree(&["verify", "--seed", "11", "--trials", "10"]));
    assert_eq!(a, b);
    assert_eq!(a["records"][0]["trials"], 10);
}

#[test]
fn single_criterion() {
    let out = ghtree(&["verify", "--criterion", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["records"].as_array().unwrap().len(), 1);
    let out = ghtree(&["verify", "--criterion", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "UsageError");
}

#[test]
fn errors_are_machine_readable() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"labels\": [\"a\",\"b\",\"c\"],\n \"matrix\": [[0,1,5],[1,0,1],[5,1,0]]}");
    let out = ghtree(&["ultra", "--space", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"], "ValidationError");
    assert_eq!(e["field"], "matrix");
    assert_eq!(e["line"], 2);
    assert!(e["message"].as_str().unwrap().contains("(a, b, c)"));

    let out = ghtree(&["gh", "--a", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "UsageError");

    let out = ghtree(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    let big = write(
        &dir,
        "big.json",
        &serde_json::json!({
            "labels": (0..6).map(|i| format!("p{i}")).collect::<Vec<_>>(),
            "matrix": (0..6).map(|i| (0..6).map(|j| if i == j { 0 } else { 1 }).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
        .to_string(),
    );
    let out = ghtree(&["gh", "--a", s(&big), "--b", s(&big)]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["kind"], "BudgetExceeded");
    let out = ghtree(&["gh", "--a", s(&big), "--b", s(&big), "--budget-cells", "36"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["gh"], 0.0);

    let out = ghtree(&["ultra", "--space", s(&big), "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hausdorff_ultra_geodesic_and_dt() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"labels": ["p","q","r"], "matrix": [[0,1,2],[1,0,1],[2,1,0]]}"#);
    let v = stdout_json(&ghtree(&["hausdorff", "--space", s(&x), "--a", "p", "--b", "q,r"]));
    assert_eq!((v["a_to_b"].as_f64(), v["b_to_a"].as_f64(), v["hausdorff"].as_f64()), (Some(1.0), Some(2.0), Some(2.0)));

    let v = stdout_json(&ghtree(&["ultra", "--space", s(&x)]));
    assert_eq!(v["diameter"], 1.0);
    assert_eq!(v["u_matrix"], serde_json::json!([[0.0,1.0,1.0],[1.0,0.0,1.0],[1.0,1.0,0.0]]));

    let v = stdout_json(&ghtree(&["dt-check", "--space", s(&x), "--t", "0.5"]));
    assert_eq!(v["connected"], false);
    let v = stdout_json(&ghtree(&["dt-check", "--space", s(&x), "--t", "1", "--basepoint", "q"]));
    assert_eq!(v["connected"], true);
    assert!(v["distortion_bound"].as_f64().unwrap() <= 1.0 + 1e-9);

    let t = write(&dir, "t.json", r#"{"vertices": ["a","b"], "edges": [["a","b",10]]}"#);
    let ends = write(&dir, "ends.json", r#"{"vertices": ["a","b"]}"#);
    let whole = write(&dir, "whole.json", r#"{"edge_intervals": [[0, 0, 10]]}"#);
    let v = stdout_json(&ghtree(&["hausdorff", "--tree", s(&t), "--a", s(&ends), "--b", s(&whole)]));
    assert_eq!(v["hausdorff"], 5.0);
    let out = ghtree(&["geodesic", "--tree", s(&t), "--a", s(&ends), "--b", s(&whole), "--at", "0,2,5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["d"], 5.0);
    assert_eq!(v["additive"], true);
    assert_eq!(v["slices"][1]["slice"]["edge_intervals"], serde_json::json!([[0, 0.0, 2.0], [0, 8.0, 10.0]]));
    let out = ghtree(&["geodesic", "--tree", s(&t), "--a", s(&ends), "--b", s(&whole), "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 11);
    let out = ghtree(&["geodesic", "--tree", s(&t), "--a", s(&ends), "--b", s(&whole), "--at", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["kind"], "OutOfRange");
}
