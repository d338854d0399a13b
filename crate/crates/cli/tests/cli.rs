use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn altcard(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altcard")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_cobb_douglas_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["verify", "--oracle", "cobb_douglas", "--trials", "300"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for axiom in ["consistency", "crossover", "second_consistency", "continuity", "monotonicity"] {
        let r = json(&dir.path().join(format!("{axiom}.json")));
        assert_eq!(r["report"]["verdict"], "pass");
        assert_eq!(r["config"]["oracle"], "cobb_douglas");
    }
    assert_eq!(json(&dir.path().join("continuity.json"))["report"]["proxy"], true);
}

#[test]
fn verify_broken_crossover_fails_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["verify", "--oracle", "broken_crossover", "--trials", "200"], dir.path());
    assert_eq!(code(&o), 1);
    let r = json(&dir.path().join("crossover.json"));
    assert_eq!(r["report"]["verdict"], "fail");
    assert!(!r["report"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&altcard(&["verify"], dir.path())), 2);
    assert_eq!(code(&altcard(&["verify", "--oracle", "no_such_fixture"], dir.path())), 2);
    assert_eq!(code(&altcard(&["verify", "--oracle", "linear", "--trials", "0"], dir.path())), 2);
    assert_eq!(code(&altcard(&["verify", "--oracle", "linear", "--tol-t", "-1"], dir.path())), 2);
    assert_eq!(code(&altcard(&["verify", "--expr", "/nonexistent.json"], dir.path())), 2);
    assert_eq!(code(&altcard(&["frobnicate"], dir.path())), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"oracle": "linear", "trials": 50, "seed": 9}"#).unwrap();
    let out = dir.path().join("out");
    let o = altcard(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "11"], &out);
    assert_eq!(code(&o), 0);
    let r = json(&out.join("summary.json"));
    assert_eq!(r["config"]["trials"], 50);
    assert_eq!(r["config"]["seed"], 11);

    fs::write(&cfg, r#"{"oracle": "linear", "trails": 50}"#).unwrap();
    assert_eq!(code(&altcard(&["verify", "--config", cfg.to_str().unwrap()], &out)), 2);
}

#[test]
fn concavity_exp1d_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["concavity", "--oracle", "exp1d", "--trials", "200"], dir.path());
    assert_eq!(code(&o), 1);
    let r = json(&dir.path().join("concavity.json"));
    assert_eq!(r["ggfl"]["law"], "fails");
    assert!(!r["ggfl"]["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn concavity_strict_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["concavity", "--oracle", "concave_quadratic", "--trials", "200", "--strict"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("concavity.json"))["ggfl"]["law"], "holds_strictly");
    let o = altcard(&["concavity", "--oracle", "concave_quadratic", "--trials", "200"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("concavity.json"))["ggfl"]["law"], "holds");
}

#[test]
fn smoothness_kinked_composite_reports_a_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["smoothness", "--oracle", "kinked_composite", "--b", "1", "--trials", "50"], dir.path());
    assert_eq!(code(&o), 1);
    let r = json(&dir.path().join("smoothness.json"));
    assert!((r["line"]["estimate"].as_f64().unwrap() - 0.25).abs() < 1e-3);
    assert_eq!(r["line"]["verdict"], "not_line_smooth");
    let table = fs::read_to_string(dir.path().join("limit.csv")).unwrap();
    assert!(table.starts_with("a,f,quotient\n"));
    assert_eq!(table.lines().count(), 14);
}

#[test]
fn alep_cobb_douglas_is_complement_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["alep", "--oracle", "cobb_douglas", "--grid", "5"], dir.path());
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("alep.json"));
    let classes = r["classifications"].as_array().unwrap();
    assert_eq!(classes.len(), 25);
    assert!(classes.iter().all(|c| c["label"] == "complement"));
    let table = fs::read_to_string(dir.path().join("alep.csv")).unwrap();
    assert!(table.starts_with("x1,x2,estimate,label\n"));
}

#[test]
fn alep_on_shallow_reconstruction_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        altcard(&["alep", "--oracle", "cobb_douglas", "--alep-source", "reconstruction", "--depth", "8"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn reconstruct_linear_with_second_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["reconstruct", "--oracle", "linear", "--second-anchors", "1,1;9,9", "--grid", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("representation.json"));
    assert_eq!(rep["representation"]["mismatches_outside_band"], 0);
    assert!(rep["affine"]["max_residual"].as_f64().unwrap() < 5e-3);
    let art = json(&dir.path().join("utility.json"));
    assert_eq!(art["artifact"]["depth"], 10);
    assert_eq!(art["artifact"]["rungs"].as_array().unwrap().len(), 1025);
    let grid = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines[0], "x1,x2,value");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "0.1,0.1,0");
}

#[test]
fn reconstruct_non_monotone_fails_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let o = altcard(&["reconstruct", "--oracle", "step"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}

#[test]
fn expression_file_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let expr = dir.path().join("u.json");
    fs::write(&expr, r#"{"name": "cd", "dimension": 2, "utility": {"sqrt": {"mul": [{"var": 0}, {"var": 1}]}}}"#)
        .unwrap();
    let o = altcard(&["alep", "--expr", expr.to_str().unwrap(), "--grid", "3"], &dir.path().join("out"));
    assert_eq!(code(&o), 0);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let files = ["consistency", "crossover", "second_consistency", "continuity", "monotonicity", "summary"];
    let read = || files.map(|f| fs::read_to_string(dir.path().join(format!("{f}.json"))).unwrap());
    let args = ["verify", "--oracle", "broken_crossover", "--trials", "300", "--seed", "5", "--workers"];
    let run = |w: &str| {
        let mut a = args.to_vec();
        a.push(w);
        code(&altcard(&a, dir.path()))
    };
    assert_eq!(run("1"), 1);
    let first = read();
    assert_eq!(run("4"), 1);
    assert_eq!(first, read());
    assert_eq!(run("4"), 1);
    assert_eq!(first, read());
}

#[test]
fn catalog_lists_fixtures() {
    let o = Command::new(env!("CARGO_BIN_EXE_altcard")).arg("catalog").output().unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"kinked_composite") && names.contains(&"broken_crossover"));
}
