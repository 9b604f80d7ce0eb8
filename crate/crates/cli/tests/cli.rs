use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorpure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const SMALL: [&str; 8] = [
    "--modulus",
    "4",
    "--max-order",
    "8",
    "--max-kernel",
    "4",
    "--purity-order",
    "4",
];

#[test]
fn passing_run_exits_zero_with_report_fields() {
    let out = run(&[&SMALL[..], &["flat-equiv"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for field in ["config", "suites", "elapsed_ms"] {
        assert!(report.get(field).is_some(), "missing {field}");
    }
    let suite = &report["suites"][0];
    assert_eq!(suite["name"], "flat-equiv");
    assert_eq!(suite["failed"], 0);
    assert!(suite["checked"].as_u64().unwrap() > 0);
    assert!(suite["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_deterministic() {
    let args = [
        &SMALL[..],
        &["--mode", "sample", "--samples", "2", "--seed", "7", "prop1"],
    ]
    .concat();
    let (mut a, mut b) = (json(&run(&args)), json(&run(&args)));
    a["elapsed_ms"] = Value::Null;
    b["elapsed_ms"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn text_format() {
    let out = run(&["--modulus", "9", "--format", "text", "structural"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS structural n=9"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["--modulus", "1", "prop1"][..],
        &["--mode", "sample", "prop1"],
        &["--mode", "sideways", "prop1"],
        &["no-such-suite"],
        &[],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn mutated_oracle_counterexamples_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path_arg = path.to_str().unwrap();
    let out = run(&[&SMALL[..], &["--mutate-skip-divisor", "2", "--out", path_arg, "prop1"]].concat());
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let first = &report["suites"][0]["counterexamples"][0];
    assert_eq!(first["check"], "prop1");
    assert_eq!(first["data"]["skip_divisor"], 2);

    let replayed = run(&["replay", path_arg]);
    assert_eq!(replayed.status.code(), Some(1));
    let text = String::from_utf8(replayed.stdout).unwrap();
    assert!(!text.contains("passes now"), "{text}");
    assert!(text.contains("counterexamples reproduced"));
}

#[test]
fn replay_of_clean_report_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path_arg = path.to_str().unwrap();
    assert_eq!(
        run(&["--modulus", "4", "--out", path_arg, "structural"]).status.code(),
        Some(0)
    );
    let out = run(&["replay", path_arg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "0 of 0 counterexamples reproduced"
    );
    assert_eq!(run(&["replay", "/nonexistent/report.json"]).status.code(), Some(2));
}
