use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn erelax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erelax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("erelax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const PLANTED_LP: &str = "lp 4 3\n1 : x1 x2\n0 : x3 -x1\n1 : x2 x4\n";

#[test]
fn solve_reports_a_verified_witness() {
    let lp = scratch("planted.lp", PLANTED_LP);
    let out = erelax(&["solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["status"], "solved");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["witness"].as_array().unwrap().len(), 4);
    for key in ["restarts_used", "steps_used", "T", "R", "per_restart_steps"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let lp = scratch("repeat.lp", PLANTED_LP);
    let args = ["solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1", "--trace"];
    let a = erelax(&args);
    let b = erelax(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_64() {
    let lp = scratch("usage.lp", PLANTED_LP);
    assert_eq!(erelax(&["solve", "--lp", lp.to_str().unwrap()]).status.code(), Some(64));
    assert_eq!(erelax(&["verify", "--suite", "bogus"]).status.code(), Some(64));
    let capped = erelax(&[
        "solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1", "--max-restarts", "2",
    ]);
    assert_eq!(capped.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("restart"));
}

#[test]
fn infeasible_relaxation_exits_3() {
    let lp = scratch("infeasible.lp", "lp 1 1\n-1 : x1\n");
    let out = erelax(&["solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "relaxation_infeasible");
}

#[test]
fn zero_restarts_exhaust() {
    let lp = scratch("exhaust.lp", PLANTED_LP);
    let out = erelax(&["solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1", "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_65() {
    let bad_lp = scratch("bad.lp", "lp 2\n");
    let out = erelax(&["solve", "--lp", bad_lp.to_str().unwrap(), "--E", "0,1"]);
    assert_eq!(out.status.code(), Some(65));
    let bad_e = scratch("ok.lp", PLANTED_LP);
    let out = erelax(&["solve", "--lp", bad_e.to_str().unwrap(), "--E", "0,2/3;1/3,1"]);
    assert_eq!(out.status.code(), Some(65));
    let malformed = scratch("bad.cnf", "p cnf 3\n1 2 0\n");
    assert_eq!(erelax(&["cnf", malformed.to_str().unwrap(), "--k", "3"]).status.code(), Some(65));
    let wide = scratch("wide.cnf", "p cnf 4 1\n1 2 3 4 0\n");
    assert_eq!(erelax(&["cnf", wide.to_str().unwrap(), "--k", "3"]).status.code(), Some(65));
}

#[test]
fn cnf_prints_a_satisfying_assignment() {
    let cnf = scratch(
        "sat.cnf",
        "c planted at 1 0 1 1 0\np cnf 5 6\n1 2 3 0\n-2 4 5 0\n-1 -5 3 0\n2 -3 4 0\n-4 1 -2 0\n3 5 -2 0\n",
    );
    for encoder in ["direct", "basic"] {
        let out = erelax(&["cnf", cnf.to_str().unwrap(), "--k", "3", "--encoder", encoder]);
        assert_eq!(out.status.code(), Some(0), "{encoder}");
        let lits: Vec<i64> = json(&out)["assignment"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_i64().unwrap())
            .collect();
        let clauses = [[1, 2, 3], [-2, 4, 5], [-1, -5, 3], [2, -3, 4], [-4, 1, -2], [3, 5, -2]];
        for c in clauses {
            assert!(c.iter().any(|l| lits.contains(l)), "{encoder}: clause {c:?}");
        }
    }
}

#[test]
fn analyze_reports_exact_quantities() {
    let out = erelax(&["analyze", "--E", "0,1/3;2/3,1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["beta"], "3/4");
    assert_eq!(r["tau"], "2");
    assert_eq!(r["gamma"], "1/2");
    assert_eq!(r["T"], 171);
    assert_eq!(r["u0"], serde_json::json!(["1", "1/2"]));
    assert_eq!(r["q_canonical"], serde_json::json!(["1/2", "1/2"]));

    let full = json(&erelax(&["analyze", "--E", "0,1"]));
    assert_eq!(full["beta"], "1");
    assert!(full["tau"].is_null());
    assert!(full["note"].is_string());

    assert_eq!(erelax(&["analyze", "--E", "0,1/2"]).status.code(), Some(65));
}

#[test]
fn optimize_mode_reports_objective() {
    let lp = scratch("opt.lp", "lp 3 1\n1 : x1 x2\n");
    let out = erelax(&[
        "solve", "--lp", lp.to_str().unwrap(), "--E", "0,1/3;2/3,1", "--mode", "optimize",
        "--objective", "1,1,1", "--integral",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["objective_value"], "2");
}

#[test]
fn verify_calc_passes() {
    let out = erelax(&["verify", "--suite", "calc"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}
