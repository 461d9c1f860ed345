mod common;

use std::process::Command;

use common::fixture_path;
use serde_json::Value;

fn admit(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_admit")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = if stdout.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&stdout).unwrap()
    };
    (out.status.code().unwrap(), report, String::from_utf8(out.stderr).unwrap())
}

fn path(name: &str) -> String {
    fixture_path(name).display().to_string()
}

#[test]
fn solve_ties_min_on_tied_pair() {
    let (code, r, _) = admit(&["solve", "--model", "scorelimits", "--mode", "ties-min", &path("i3_tied_pair.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["solution"]["score_limits"]["c1"], 6);
    assert_eq!(r["solution"]["matching"]["a1"], Value::Null);
    assert_eq!(r["verdict"], "stable");
}

#[test]
fn solve_lower_without_stable_solution() {
    let (code, r, _) = admit(&["solve", "--model", "lower", &path("i5_lower_infeasible.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "infeasible");
    assert_eq!(r["oracle_confirms_infeasible"], true);
}

#[test]
fn check_reports_the_blocking_pair() {
    let (code, r, _) = admit(&[
        "check",
        "--variant",
        "classical",
        &path("i2_two_applicants.json"),
        &path("i2_bad_solution.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "unstable");
    let v = r["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["kind"], "blocking_pair");
    let involved = v[0]["involved"].to_string();
    assert!(involved.contains("a1") && involved.contains("c1"), "{involved}");
}

#[test]
fn compare_shows_the_heuristic_failing() {
    let (code, r, _) = admit(&["compare", &path("i8_heuristic_fails.json")]);
    assert_eq!(code, 0);
    assert_ne!(r["heuristic"]["verdict"], "stable");
    assert_eq!(r["ip"]["verdict"], "stable");
}

#[test]
fn enumerate_counts_stable_solutions() {
    let (code, r, _) = admit(&["enumerate", "--variant", "lower", &path("i5_lower_infeasible.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["count"], 0);
    let (code, r, _) = admit(&["enumerate", "--variant", "scorelimits-h", &path("i3_tied_pair.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["count"], 1);
    assert_eq!(r["solutions"][0]["score_limits"]["c1"], 6);
}

#[test]
fn validate_summarizes_features() {
    let (code, r, _) = admit(&["validate", &path("i6_common_infeasible.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["features"]["nested"], false);
    assert_eq!(r["instance"]["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--seed", "7", "--applicants", "5", "--paired-prob", "0.3"];
    let (c1, a, _) = admit(&args);
    let (c2, b, _) = admit(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (_, other, _) = admit(&["generate", "--seed", "8", "--applicants", "5", "--paired-prob", "0.3"]);
    assert_ne!(a, other);
}

#[test]
fn paired_models_agree_on_exit_code() {
    for extra in [&[][..], &["--via-common"][..]] {
        let mut args = vec!["solve", "--model", "paired"];
        args.extend_from_slice(extra);
        let p = path("i7_paired_infeasible.json");
        args.push(&p);
        let (code, _, _) = admit(&args);
        assert_eq!(code, 2, "{args:?}");
    }
}

#[test]
fn bad_usage_exits_one() {
    let (code, _, err) = admit(&["solve", "--model", "nope", &path("i1_single.json")]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}
