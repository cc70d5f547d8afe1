use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qtherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtherm")).args(args).env_remove("QTHERM_SEED").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    let text = stdout(o);
    assert_eq!(text.lines().count(), 1, "one object per invocation: {text}");
    serde_json::from_str(&text).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn transform_examples() {
    let o = qtherm(&["transform", "--q", "1.5", "--alpha", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["q_alpha"].as_f64().unwrap(), 1.25);
    assert_eq!(v["additive_dual"].as_f64().unwrap(), 0.5);
    assert!((v["multiplicative_dual"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);

    let o = qtherm(&["transform", "--q", "1", "--alpha", "9"]);
    assert_eq!(json(&o)["q_alpha"].as_f64().unwrap(), 1.0);

    let o = qtherm(&["transform", "--q", "1.5", "--alpha", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha must be nonzero"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn transform_csv_has_header() {
    let o = qtherm(&["transform", "--q", "0.5", "--alpha", "-1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("q,alpha,q_alpha"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2].parse::<f64>().unwrap(), 1.5);
}

#[test]
fn flag_errors_exit_two() {
    assert_eq!(code(&qtherm(&["transform", "--q", "1.5"])), 2);
    assert_eq!(code(&qtherm(&["nonsense"])), 2);
    assert_eq!(code(&qtherm(&["transform", "--q", "nan", "--alpha", "1"])), 2);
    assert_eq!(code(&qtherm(&["--help"])), 0);
}

#[test]
fn entropy_examples() {
    let dir = TempDir::new().unwrap();
    let uniform = write(&dir, "u.txt", "0.5\n0.5\n");

    let o = qtherm(&["entropy", "--input", s(&uniform), "--kind", "tsallis", "--q", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["n"], 2);

    let o = qtherm(&["entropy", "--input", s(&uniform), "--kind", "shannon"]);
    assert!((json(&o)["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);

    let o = qtherm(&["entropy", "--input", s(&uniform), "--kind", "hybrid", "--q", "0.3"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));

    let o = qtherm(&["entropy", "--input", s(&uniform), "--kind", "renyi"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_files_exit_three_with_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "p\n0.5\nzero point five\n");
    let o = qtherm(&["entropy", "--input", s(&bad), "--kind", "shannon"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));

    let negative = write(&dir, "neg.txt", "0.5\n-0.1\n");
    assert_eq!(code(&qtherm(&["entropy", "--input", s(&negative), "--kind", "shannon"])), 3);

    let missing = dir.path().join("absent.txt");
    assert_eq!(code(&qtherm(&["entropy", "--input", s(&missing), "--kind", "shannon"])), 3);
}

#[test]
fn maxent_alpha_one_reports_affinity() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0\n1\n2\n");
    let o = qtherm(&["maxent", "--input", s(&e), "--q", "1.2", "--alpha", "1", "--omega", "0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    for key in ["Z_q", "Z_q_alpha", "phi", "escort_mean", "residual", "iterations", "converged", "levels"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    let p: Vec<f64> = levels.iter().map(|l| l["p"].as_f64().unwrap()).collect();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    assert!(p[0] > p[1] && p[1] > p[2]);
    assert!(v["affinity_residual"].as_f64().unwrap() <= 1e-8);
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["converged"], true);
}

#[test]
fn maxent_zero_omega_is_uniform() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "E\n0\n1\n2\n");
    let o = qtherm(&["maxent", "--input", s(&e), "--q", "1.2", "--alpha", "2", "--omega", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for l in v["levels"].as_array().unwrap() {
        assert!((l["p"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }
    assert!(v["residual"].as_f64().unwrap() < 1e-14);
}

#[test]
fn maxent_without_real_root_exits_five_naming_level() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0\n1\n2\n");
    let o = qtherm(&["maxent", "--input", s(&e), "--q", "1.2", "--alpha", "2", "--omega", "100"]);
    assert_eq!(code(&o), 5);
    let v = json(&o);
    assert!(v["level"].as_u64().is_some(), "{v}");
    assert!(v["b"].as_f64().unwrap() > 0.25);
    assert!(stderr(&o).contains("level"), "{}", stderr(&o));
}

#[test]
fn maxent_flag_validation() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0\n1\n");
    let base = ["maxent", "--input", s(&e), "--q", "1.2"];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        code(&qtherm(&args))
    };
    assert_eq!(with(&["--alpha", "2"]), 2);
    assert_eq!(with(&["--alpha", "2", "--omega", "1", "--target-mean", "0.5"]), 2);
    assert_eq!(with(&["--alpha", "-1", "--omega", "0.1"]), 2);
    assert_eq!(with(&["--alpha", "inf", "--omega", "0.1"]), 0);
}

#[test]
fn maxent_target_mean_and_renyi() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0\n1\n2\n3\n");
    let o = qtherm(&["maxent", "--input", s(&e), "--q", "0.8", "--alpha", "2", "--target-mean", "1.1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!((json(&o)["escort_mean"].as_f64().unwrap() - 1.1).abs() < 1e-10);

    let o = qtherm(&["maxent", "--input", s(&e), "--q", "1.2", "--alpha", "2", "--omega", "0.1", "--entropy", "renyi"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn maxent_csv_feeds_entropy() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0\n0.5\n1.3\n2\n");
    let o = qtherm(&["maxent", "--input", s(&e), "--q", "1.3", "--alpha", "2", "--omega", "0.2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let table = write(&dir, "table.csv", &stdout(&o));
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("i,E,p\n"));
    assert!(text.contains("# converged,true"));

    let o = qtherm(&["entropy", "--input", s(&table), "--kind", "tsallis", "--q", "1.3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(json(&o)["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn trinomial_and_heatbath() {
    let o = qtherm(&["trinomial", "--alpha", "2", "--b", "0.2"]);
    assert_eq!(code(&o), 0);
    let x = json(&o)["x"].as_f64().unwrap();
    assert!((x - (1.0 - (1.0f64 - 0.8).sqrt()) / 0.4).abs() < 1e-14);

    assert_eq!(code(&qtherm(&["trinomial", "--alpha", "2", "--b", "0.3"])), 5);

    let o = qtherm(&["heatbath", "--n", "11", "--alpha", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["q"].as_f64().unwrap() - 1.1).abs() < 1e-15);
    assert!((v["n_alpha"].as_f64().unwrap() - 21.0).abs() < 1e-12);
    assert!((v["q_alpha"].as_f64().unwrap() - v["q_of_n_alpha"].as_f64().unwrap()).abs() < 1e-15);
}

#[test]
fn algebra_check_reports_each_identity() {
    let o = qtherm(&["algebra-check", "--x", "0.7", "--y", "1.4", "--q", "1.3", "--alpha", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["outcome"] == "holds"));

    let o = qtherm(&["algebra-check", "--x", "0.7", "--y", "1.4", "--q", "1.3", "--alpha", "2", "--tol", "0"]);
    let v = json(&o);
    let fails = v["checks"].as_array().unwrap().iter().filter(|c| c["outcome"] == "fails").count();
    assert_eq!(code(&o), if fails > 0 { 1 } else { 0 });
}

#[test]
fn check_suites() {
    let o = qtherm(&["check", "--suite", "group", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().ends_with("properties passed (seed 7)"));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS group.")).count() >= 8);

    let o = qtherm(&["check", "--suite", "all", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = qtherm(&["check", "--suite", "algebra", "--samples", "200", "--tol-scale", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn check_is_deterministic_and_honors_env_seed() {
    let args = ["check", "--suite", "entropy", "--samples", "300", "--format", "json"];
    let a = qtherm(&args);
    let b = qtherm(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);

    let o = Command::new(env!("CARGO_BIN_EXE_qtherm")).args(args).env("QTHERM_SEED", "99").output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["seed"], 99);

    let o = Command::new(env!("CARGO_BIN_EXE_qtherm")).args(args).env("QTHERM_SEED", "seven").output().unwrap();
    assert_eq!(code(&o), 2);
}
