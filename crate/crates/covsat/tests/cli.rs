use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn covsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covsat")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_exit_codes() {
    let sat = covsat(&["solve", &fixture("e1.cnf")]);
    assert_eq!(sat.status.code(), Some(10));
    assert!(stdout(&sat).contains("s SATISFIABLE\nv 1 2 0\n"));

    let unsat = covsat(&["solve", &fixture("e2.cnf")]);
    assert_eq!(unsat.status.code(), Some(20));
    assert!(stdout(&unsat).contains("c reason non-removable-useless-vertex 1"));

    assert_eq!(covsat(&["solve", "/nonexistent.cnf"]).status.code(), Some(2));
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cnf");
    std::fs::write(&bad, "p cnf 2 1\n1 5 0\n").unwrap();
    let o = covsat(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn json_report_fields() {
    let o = covsat(&["solve", "--json", "--count-ops", &fixture("e3.cnf")]);
    assert_eq!(o.status.code(), Some(20));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "UNSAT");
    assert_eq!(v["reason"]["kind"], "unreachable-column");
    assert_eq!(v["reason"]["index"], 1);
    assert_eq!(v["n"], 2);
    assert_eq!(v["m"], 3);
    assert_eq!(v["input_length"], 4);
    assert!(v["op_total"].as_u64().unwrap() > 0);
    assert_eq!(v["trace_hash"].as_str().unwrap().len(), 64);

    let o = covsat(&["solve", "--json", &fixture("e1.cnf")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["assignment"], serde_json::json!([1, 2]));
}

#[test]
fn positive_orientation_and_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let o = covsat(&["solve", "--alpha", "pos", "--trace", trace.to_str().unwrap(), &fixture("e2.cnf")]);
    assert_eq!(o.status.code(), Some(20));
    assert!(!std::fs::read_to_string(&trace).unwrap().is_empty());
}

#[test]
fn covering_command() {
    let o = covsat(&["covering", &fixture("e1.decomp")]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(stdout(&o), "covering swaps [1 2]\n");
}

#[test]
fn fuzz_and_exhaustive_reports() {
    let o = covsat(&["fuzz", "--seed", "3", "--count", "200", "--vars", "1..8", "--clauses", "1..20"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 200);
    assert_eq!(v["gate_violations"], 0);

    let o = covsat(&["diff-exhaustive", "--max-n", "2", "--max-m", "3", "--max-width", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["source"], "exhaustive");

    assert_eq!(covsat(&["fuzz", "--vars", "5..2"]).status.code(), Some(2));
}

#[test]
fn probe_command() {
    let o = covsat(&["probe", "--sizes", "1e2,3e2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["probe"]["rows"].as_array().unwrap().len(), 2);
}
