use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::NamedTempFile;

const SCHEMA: &str = include_str!("../schemas/report.schema.json");

fn refgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refgraph"))
        .args(args)
        .env_remove("REFGRAPH_SINK_LIMIT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = refgraph(&full);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\nstderr: {}", String::from_utf8_lossy(&out.stderr)));
    (v, code(&out))
}

fn temp(text: &str, suffix: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn truncation(n: usize) -> NamedTempFile {
    let out = refgraph(&["build-yablo", "--n", &n.to_string(), "--print", "dsl"]);
    assert_eq!(code(&out), 0);
    temp(&stdout(&out), ".refgraph")
}

#[test]
fn check_on_truncation_gives_c1() {
    let t = truncation(4);
    let (v, c) = json(&["check", t.path().to_str().unwrap(), "--node", "x0"]);
    assert_eq!(c, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["statuses"][0]["node"], "x0");
    assert_eq!(v["result"]["statuses"][0]["status"], "C1Holds");
    assert!(v["result"]["statuses"][0]["pos_witness"].is_null());
}

#[test]
fn classify_variants_table() {
    let (v, c) = json(&["classify-variants"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["variants"].as_array().unwrap().len(), 18);
    assert_eq!(v["result"]["all_ok_count"], 5);
}

#[test]
fn exit_codes() {
    let chain = temp("a -- b\nb -- c\nc -- d\n", ".refgraph");
    let chain = chain.path().to_str().unwrap();
    let (v, c) = json(&["inject", chain, "--n", "2"]);
    assert_eq!((c, v["status"].as_str()), (1, Some("negative")));
    assert_eq!(v["result"]["outcome"], "absent");

    let (v, c) = json(&["inject", "--fixture", "triangle", "--n", "2"]);
    assert_eq!((c, v["result"]["outcome"].as_str()), (0, Some("found")));

    let t = truncation(4);
    let (v, c) = json(&["inject", t.path().to_str().unwrap(), "--n", "3", "--budget", "3"]);
    assert_eq!((c, v["status"].as_str()), (3, Some("inconclusive")));

    let bad = temp("x = !y &\n", ".refgraph");
    let out = refgraph(&["check", bad.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at 1:9"));

    assert_eq!(code(&refgraph(&["check", "/nonexistent/graph.refgraph"])), 2);
    assert_eq!(code(&refgraph(&["check", "--fixture", "nope"])), 2);
    assert_eq!(code(&refgraph(&["no-such-command"])), 2);
    assert_eq!(code(&refgraph(&["--help"])), 0);
}

#[test]
fn validate_print_round_trips() {
    let t = truncation(3);
    let dsl = std::fs::read_to_string(t.path()).unwrap();
    let as_json = stdout(&refgraph(&["validate", t.path().to_str().unwrap(), "--print", "json"]));
    let j = temp(&as_json, ".refgraph.json");
    let back = stdout(&refgraph(&["validate", j.path().to_str().unwrap(), "--print", "dsl"]));
    assert_eq!(back, dsl);
    let again = stdout(&refgraph(&["validate", j.path().to_str().unwrap(), "--print", "json"]));
    assert_eq!(again, as_json);
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_refgraph"))
        .args(["--format", "json", "check", "-", "--node", "x"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"x = !y & !z\ny = !z\n").unwrap();
    let out = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["statuses"][0]["status"], "C1Holds");
}

fn every_command(dir: &std::path::Path) -> Vec<Vec<String>> {
    let chain = dir.join("chain.refgraph");
    std::fs::write(&chain, "a -- b\nb -- c\nc -- d\n").unwrap();
    let script = dir.join("script.txt");
    let depth1 = refgraph(&["--format", "json", "replay-construction", "--depth", "1"]);
    let v: Value = serde_json::from_slice(&depth1.stdout).unwrap();
    let steps: Vec<&str> = v["result"]["ledger"].as_array().unwrap().iter().map(|e| e["step"].as_str().unwrap()).collect();
    std::fs::write(&script, steps.join("\n")).unwrap();
    let chain = chain.to_str().unwrap();
    let script = script.to_str().unwrap();
    let lines: Vec<&str> = vec![
        "validate --fixture gamma",
        "check --fixture four-paths",
        "models --fixture gamma --node x",
        "models --fixture gamma-prime --node x --polarity neg",
        "expr --fixture gamma",
        "eval3 --fixture gamma --sink z=xi",
        "cells --fixture four-paths --from x0 --to x4",
        "cells --fixture triangle --from x --to z",
        "classify-variants",
        "build-yablo --n 3",
        "replay-construction --depth 2 --node x0",
        "insert-tautology --side xy:+ --side yz:-",
        "audit-composition --fixture composition",
        "audit-composition --fixture triangle --origin x",
        "inject --fixture triangle --n 2",
        "extend --fixture triangle --n 2",
        "report --fixture pipeline:2",
    ];
    let mut all: Vec<Vec<String>> = lines.iter().map(|l| l.split(' ').map(String::from).collect()).collect();
    all.push(vec!["inject".into(), chain.into(), "--n".into(), "2".into()]);
    all.push(vec!["extend".into(), chain.into(), "--n".into(), "2".into()]);
    all.push(vec!["replay-construction".into(), "--script".into(), script.into()]);
    all.push(vec!["insert-tautology".into(), "--sign".into(), "-".into(), "--arrow".into(), "x0,x1".into(), "TRI".into()]);
    all
}

#[test]
fn json_output_matches_schema() {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.refgraph");
    std::fs::write(&tri, "x0 = !x1 & !x2\nx1 = !x2\n").unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for mut args in every_command(dir.path()) {
        for a in &mut args {
            if a == "TRI" {
                *a = tri.to_str().unwrap().into();
            }
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (v, c) = json(&refs);
        assert!(c <= 3, "{args:?}");
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:#?}");
        seen.insert(v["invocation"]["command"].as_str().unwrap().to_string());
    }
    assert_eq!(seen.len(), 14);

    let broken = serde_json::json!({"invocation": {"command": "check", "max_len": 1, "sink_limit": 1}, "status": "ok", "result": {}});
    assert!(!validator.is_valid(&broken));
}

#[test]
fn text_output_is_a_function_of_the_report() {
    let dir = tempfile::tempdir().unwrap();
    for args in every_command(dir.path()).into_iter().filter(|a| !a.contains(&"TRI".to_string())) {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = refgraph(&refs);
        let second = refgraph(&refs);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let (_, c) = json(&refs);
        assert_eq!(code(&first), c, "{args:?}");
        let text = stdout(&first);
        let command = args[0].as_str();
        assert!(text.starts_with(&format!("{command}: ")), "{args:?}: {text}");
    }
}

#[test]
fn sink_limit_from_environment() {
    let wide = (0..6).map(|i| format!("!s{i}")).collect::<Vec<_>>().join(" | ");
    let g = temp(&format!("x = {wide}\n"), ".refgraph");
    let path = g.path().to_str().unwrap();
    let (v, c) = json(&["models", path, "--node", "x"]);
    assert_eq!((c, v["invocation"]["sink_limit"].as_u64()), (0, Some(24)));
    assert_eq!(v["result"]["pos"]["count"], 63);

    let out = Command::new(env!("CARGO_BIN_EXE_refgraph"))
        .args(["--format", "json", "models", path, "--node", "x"])
        .env("REFGRAPH_SINK_LIMIT", "4")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains('6'));

    let out = Command::new(env!("CARGO_BIN_EXE_refgraph"))
        .args(["--format", "json", "--sink-limit", "8", "models", path, "--node", "x"])
        .env("REFGRAPH_SINK_LIMIT", "4")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["invocation"]["sink_limit"], 8);
}

#[test]
fn jobs_flag_does_not_change_results() {
    let t = truncation(6);
    let p = t.path().to_str().unwrap();
    let one = stdout(&refgraph(&["--jobs", "1", "--format", "json", "report", p]));
    let four = stdout(&refgraph(&["--jobs", "4", "--format", "json", "report", p]));
    assert_eq!(one, four);
}
