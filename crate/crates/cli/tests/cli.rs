use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn wittlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlift")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_triangular() {
    let out = wittlift(&["analyze", "--input", &fixture("triangular_p3.endo"), "--task", "gamma"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["analysis"]["liftable"], false);
    assert_eq!(v["analysis"]["poisson"], false);
    assert_eq!(v["analysis"]["C"][0][3], serde_json::json!([[[0, 0, 0, 0], 2]]));
    assert_eq!(v["gamma"]["gamma"][2], serde_json::json!([[[0, 1, 0, 0], 1]]));
}

#[test]
fn lift_etale() {
    let v = json(&wittlift(&["lift", "--input", &fixture("etale_p3_i0.endo")]));
    assert_eq!(v["lift"]["liftable"], true);
    assert_eq!(v["lift"]["verified"], true);
    assert_eq!(v["lift"]["phi"].as_array().unwrap().len(), 2);
    let v = json(&wittlift(&["lift", "--input", &fixture("etale_p3_i2.endo")]));
    assert_eq!(v["lift"]["liftable"], false);
}

#[test]
fn trace_check_identity() {
    let v = json(&wittlift(&["trace-check", "--input", &fixture("identity_p2.endo")]));
    assert_eq!(v["trace"]["top_coefficient_is_one"], true);
    assert_eq!(v["trace"]["operator_identity"], true);
}

#[test]
fn exit_codes() {
    let out = wittlift(&["validate", "--input", &fixture("relation_violation.endo")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "RelationViolation");
    let out = wittlift(&["validate", "--input", &fixture("syntax_error.endo")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "SyntaxError");
    let out = wittlift(&["analyze", "--input", &fixture("triangular_p5.endo"), "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let out = wittlift(&["validate", "--input", &fixture("does_not_exist.endo")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let args = ["analyze", "--input", &fixture("symplectic_f9.endo"), "--task", "all"];
    let a = wittlift(&args);
    let b = wittlift(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timings_ms").is_none());
    let c = wittlift(&["corpus", "--seed", "5", "--count", "12"]);
    let d = wittlift(&["corpus", "--seed", "5", "--count", "12"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
    assert_eq!(json(&c)["count"], 12);
}

#[test]
fn json_out_and_timings() {
    let path = std::env::temp_dir().join(format!("wittlift-cli-test-{}.json", std::process::id()));
    let out = wittlift(&[
        "gamma",
        "--input",
        &fixture("etale_p3_i1.endo"),
        "--timings",
        "--json-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["gamma"]["symmetric"], true);
    assert!(v["timings_ms"]["gamma"].is_number());
}

#[test]
fn corpus_overrides() {
    let v = json(&wittlift(&["corpus", "--seed", "1", "--count", "6", "--p", "3", "--n", "1"]));
    for r in v["results"].as_array().unwrap() {
        assert_eq!(r["field"]["p"], 3);
        assert_eq!(r["n"], 1);
        assert_eq!(r["oracle"]["agrees"], true);
    }
}

#[test]
fn selftest_passes() {
    let out = wittlift(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["selftest"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}
