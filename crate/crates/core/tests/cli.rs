use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE: [&str; 8] = [
    "--sigma",
    "1.75",
    "--kappa",
    "0.5",
    "--t1",
    "1",
    "--t2",
    "2.718281828459045",
];

fn hadlyap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadlyap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_example<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter()
        .chain(EXAMPLE.iter())
        .chain(tail.iter())
        .copied()
        .collect()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = hadlyap(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    assert_eq!(
        serde_json::to_string_pretty(&value).unwrap() + "\n",
        text,
        "json must round-trip"
    );
    (value, out.status.code().unwrap())
}

#[test]
fn bound_example() {
    let (v, code) = json(&with_example(&["bound"], &[]));
    assert_eq!(code, 0);
    assert_eq!(v["command"], "bound");
    assert_eq!(v["params"]["t2"].as_f64().unwrap(), std::f64::consts::E);
    assert!((v["payload"]["bound"].as_f64().unwrap() - 2.3549027134).abs() < 1e-6);
    assert!((v["payload"]["eigen_bound"].as_f64().unwrap() - 4.0463865405).abs() < 1e-6);
    for key in ["omega", "mho", "x2", "delta"] {
        assert!(v["payload"]["kernel"][key].is_f64(), "{key}");
    }
    assert!(v["warnings"].as_array().unwrap().is_empty());
    assert!(v["version"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    let out = hadlyap(&["bound", "--sigma", "1.75", "--kappa", "0.5", "--t1", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hadlyap(&[
        "bound", "--sigma", "1.75", "--kappa", "0.5", "--t1", "1", "--t2", "e",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = hadlyap(&[
        "bound", "--sigma", "1.5", "--kappa", "0.7", "--t1", "1", "--t2", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
    let out = hadlyap(&with_example(&["check"], &["--q-expr", "ln(t"]));
    assert_eq!(out.status.code(), Some(2));
    let out = hadlyap(&with_example(
        &["check"],
        &["--q-const", "1", "--q-expr", "t"],
    ));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hadlyap(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_verdicts() {
    let (v, code) = json(&with_example(&["check"], &["--q-expr", "ln(t)"]));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["verdict"]["kind"], "NoNontrivialSolution");
    assert!((v["payload"]["q_integral"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let (v, _) = json(&with_example(&["check"], &["--q-const", "0"]));
    assert_eq!(v["payload"]["verdict"]["kind"], "NoNontrivialSolution");
    let (v, code) = json(&with_example(&["check"], &["--q-const", "10"]));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["verdict"]["kind"], "Inconclusive");
}

#[test]
fn check_with_table_and_tolerance() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "t,q").unwrap();
    for k in 0..=20 {
        let t = (k as f64 / 20.0).exp();
        writeln!(file, "{t},{}", t.ln()).unwrap();
    }
    let path = file.path().to_str().unwrap();
    let (v, code) = json(&with_example(
        &["check"],
        &["--q-table", path, "--tol", "1e-10"],
    ));
    assert_eq!(code, 0);
    // ln t is linear in ln t, so the table reproduces it exactly
    assert!((v["payload"]["q_integral"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let out = hadlyap(&with_example(
        &["check"],
        &["--q-table", "/nonexistent/q.csv"],
    ));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn green_commands() {
    let (v, _) = json(&with_example(&["green", "max"], &[]));
    assert_eq!(v["payload"]["branch"], "LeftEdge");
    let want = 0.3849001795 / 0.9064024771;
    assert!((v["payload"]["max_abs_g"].as_f64().unwrap() - want).abs() < 1e-9);
    let (v, _) = json(&with_example(&["green", "eval"], &["--t", "1", "--s", "2"]));
    assert_eq!(v["payload"]["g"].as_f64().unwrap(), 0.0);
    let out = hadlyap(&with_example(
        &["green", "eval"],
        &["--t", "0.5", "--s", "2"],
    ));
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let p = path.to_str().unwrap();
    let (v, code) = json(&with_example(
        &["green", "grid"],
        &["--n", "100", "--out", p],
    ));
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["rows"], 10000);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10001);
    assert_eq!(lines[0], "t,s,G");
}

#[test]
fn eigen_example_is_deterministic() {
    let args = with_example(&["eigen"], &["--json"]);
    let a = hadlyap(&args);
    let b = hadlyap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["payload"]["satisfied"], true);
    assert!((v["payload"]["analytic_bound"].as_f64().unwrap() - 4.0463865405).abs() < 1e-9);
    assert!(v["payload"]["lambda_min"].as_f64().unwrap() >= 4.0463865405);
    let out = hadlyap(&with_example(&["eigen"], &["--n", "4"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eigen_reports_threshold_violation() {
    // a set where the published threshold bound*(t2-t1) exceeds the computed lambda_min
    let out = hadlyap(&[
        "eigen", "--sigma", "1.915", "--kappa", "0.4691", "--t1", "1.727", "--t2", "12.1085",
        "--n", "200",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below the threshold"));
}

#[test]
fn selftest_filter_and_json() {
    let (v, code) = json(&["selftest", "--filter", "green"]);
    assert_eq!(code, 0);
    let results = v["payload"]["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    assert!(results
        .iter()
        .all(|r| r["group"] == "green" && r["passed"] == true));
    let out = hadlyap(&["selftest", "--filter", "parser"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
}
