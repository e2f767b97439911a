// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_subsidy-orient");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", &p]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn ratio(v: &Value) -> (i64, i64) {
    let s = v.as_str().unwrap();
    match s.split_once('/') {
        Some((a, b)) => (a.parse().unwrap(), b.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

fn at_most(v: &Value, num: i64, den: i64) -> bool {
    let (a, b) = ratio(v);
    a * den <= num * b
}

#[test]
fn solve_binary_on_two_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "pairs.json", &["--family", "pairs", "--pairs", "2"]);
    let out = run(&["solve", "--instance", &inst, "--algo", "binary"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["total_subsidy"], "2");
    assert_eq!(v["algorithm"], "binary");
    assert_eq!(v["payments"].as_array().unwrap().len(), 4);
}

#[test]
fn solve_simple_on_threshold_clique() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "clique.json", &["--family", "clique", "--n", "5"]);
    let v = json(&run(&["solve", "--instance", &inst, "--algo", "simple-monotone"]));
    assert!(at_most(&v["total_subsidy"], 3, 1));
    assert_eq!(v["bound_used"]["name"], "n-2");
}

#[test]
fn solve_additive_on_path_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "path.json", &["--family", "path", "--epsilon", "1/100"]);
    let sol = dir.path().join("sol.json");
    let out = run(&[
        "solve",
        "--instance",
        &inst,
        "--algo",
        "additive-multi",
        "--output",
        sol.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert!(at_most(&v["total_subsidy"], 5, 2));
    assert!(v["total_subsidy_approx"].is_f64());
    let out = run(&["verify", "--instance", &inst, "--solution", sol.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["all_pass"], true);
}

#[test]
fn verify_flags_a_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "pairs.json", &["--family", "pairs", "--pairs", "1"]);
    let sol = dir.path().join("sol.json");
    std::fs::write(&sol, r#"{"orientation": [0], "payments": ["0", "1/2"]}"#).unwrap();
    let out = run(&["verify", "--instance", &inst, "--solution", sol.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["all_pass"], false);
}

#[test]
fn oracle_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "path.json", &["--family", "path"]);
    let out = run(&["oracle", "--instance", &inst, "--max-edges", "4", "--jobs", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["min_total"], "2");
    assert_eq!(v["visited"], 16);
    let out = run(&["oracle", "--instance", &inst, "--max-edges", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "too_many_edges");
}

#[test]
fn gen_sat_from_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    std::fs::write(&cnf, "c small\np cnf 3 4\n1 2 3 0\n1 -2 -3 0\n-1 2 -3 0\n-1 -2 3 0\n").unwrap();
    let inst = gen(dir.path(), "sat.json", &["--family", "sat", "--formula", cnf.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(v["agents"], 14);
    assert_eq!(v["edges"].as_array().unwrap().len(), 19);
    assert!(v["label"].as_str().unwrap().contains("oracle"));
    let out = run(&["oracle", "--instance", &inst]);
    assert_eq!(json(&out)["ef_zero_exists"], true);
}

#[test]
fn gen_random_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--family", "random", "--seed", "9", "--n", "6", "--m", "10", "--kind", "binary"];
    let a = std::fs::read_to_string(gen(dir.path(), "a.json", &args)).unwrap();
    let b = std::fs::read_to_string(gen(dir.path(), "b.json", &args)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn stdin_and_stdout_by_default() {
    let instance = r#"{"agents": 2, "edges": [{"id": 0, "u": 0, "v": 1, "vu": "1", "vv": "1"}],
        "valuation": {"type": "additive"}}"#;
    let out = run_stdin(&["solve"], instance);
    assert!(out.status.success());
    assert_eq!(json(&out)["total_subsidy"], "1");
}

#[test]
fn exit_codes() {
    let out = run_stdin(&["solve"], "{ not json");
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_input");

    let unscaled = r#"{"agents": 2, "edges": [{"id": 0, "u": 0, "v": 1, "vu": "2", "vv": "1"}],
        "valuation": {"type": "additive"}}"#;
    let out = run_stdin(&["solve", "--algo", "additive-multi"], unscaled);
    assert_eq!(out.status.code(), Some(3));

    assert_eq!(run(&["solve", "--algo", "greedy"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
