use std::path::PathBuf;
use std::process::Command;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("raag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn n2() -> PathBuf {
    scratch("n2.graph", r#"{"vertices": ["a", "b"], "edges": []}"#)
}

fn p3() -> PathBuf {
    scratch("p3.graph", r#"{"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]}"#)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_raag")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn arg(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dpf_target() {
    let (code, out) = run(&["embed", "dpf", "--factors", "2:2,2:2"]);
    assert_eq!(code, 0);
    assert!(out.contains("target: F_5 x F_5"), "{out}");
}

#[test]
fn fpa_target() {
    let (_, out) = run(&["embed", "fpa", "--factors", "2:2,1:2"]);
    assert!(out.contains("target: (Z^2)^{*2} * F_7"), "{out}");
}

#[test]
fn day_verify_reports_zero_failures() {
    let g = n2();
    let (code, out) = run(&["day", "verify", "--graph", arg(&g)]);
    assert_eq!(code, 0);
    assert!(out.contains("summary: instances: 300, failures: 0"), "{out}");
}

#[test]
fn obstruct_is_blocked_but_exits_zero() {
    let (s, t) = (p3(), n2());
    let (code, out) = run(&["obstruct", "--source", arg(&s), "--target", arg(&t)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("status: blocked"));
    assert!(out.contains("vertex-count"));
    let (_, same) = run(&["obstruct", "--source", arg(&s), "--target", arg(&s)]);
    assert!(same.contains("blocked: none"), "{same}");
}

#[test]
fn infeasible_shifts_are_not_errors() {
    let k2 = scratch("k2.graph", r#"{"vertices": ["a", "b"], "edges": [["a", "b"]]}"#);
    let (code, out) = run(&["shifts", "solve", "--graph", arg(&k2), "--residues", "a=2,b=1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("status: infeasible"), "{out}");
}

#[test]
fn solved_shifts_feed_lift_checks() {
    let g = n2();
    let file = std::env::temp_dir().join(format!("raag-cli-{}/n2-shifts.json", std::process::id()));
    let (code, _) = run(&["shifts", "solve", "--graph", arg(&g), "--residues", "3,3", "--out", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, check) = run(&["shifts", "check", "--graph", arg(&g), "--shifts", file.to_str().unwrap()]);
    assert!(check.starts_with("status: ok"), "{check}");
    let (_, lifts) = run(&["lifts", "verify", "--graph", arg(&g), "--shifts", file.to_str().unwrap()]);
    assert!(lifts.contains("failures: 0"), "{lifts}");
    let (_, inner) = run(&["lifts", "inner", "--graph", arg(&g), "--residues", "3,3"]);
    assert!(inner.contains("failures: 0"), "{inner}");
}

#[test]
fn malformed_graph_is_an_error() {
    let bad = scratch("bad.graph", r#"{"vertices": ["a"], "edges": [["a", "z"]]}"#);
    let (code, out) = run(&["graph", "domination", "--graph", arg(&bad)]);
    assert_ne!(code, 0);
    assert!(out.starts_with("status: error"));
}

#[test]
fn graph_round_trip() {
    let g = p3();
    let (_, out) = run(&["--json", "graph", "show", "--graph", arg(&g)]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let text = doc["payload"]["graph"].as_str().unwrap();
    let again = scratch("p3-again.graph", text);
    let (_, out2) = run(&["--json", "graph", "show", "--graph", arg(&again)]);
    assert_eq!(out, out2);
    let a = raag::SimpleGraph::from_json(text).unwrap();
    let b = raag::SimpleGraph::from_json(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn amalgam_output_reparses() {
    let g = p3();
    let file = std::env::temp_dir().join(format!("raag-cli-{}/amalgam.graph", std::process::id()));
    let (_, out) = run(&["graph", "amalgam", "--graph", arg(&g), "--along", "a,b", "--copies", "3", "--out", file.to_str().unwrap()]);
    assert!(out.contains("vertices: 5"), "{out}");
    let back = raag::SimpleGraph::from_json(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(back.order(), 5);
}

#[test]
fn deterministic_output() {
    let g = p3();
    let args = ["--json", "subgroup", "rs", "--graph", arg(&g), "--residues", "2,2,2"];
    assert_eq!(run(&args), run(&args));
    let (_, out) = run(&args);
    assert!(out.contains("\"kernel\": \"Z x F_5\""), "{out}");
}

#[test]
fn word_and_torsion_commands() {
    let g = p3();
    let (_, out) = run(&["word", "nf", "--graph", arg(&g), "--word", "b a b^-1"]);
    assert!(out.contains("normal_form: a\n"), "{out}");
    let (_, out) = run(&["word", "roots", "--graph", arg(&g), "--word", "a a b b", "--n", "2"]);
    assert!(out.contains("count: 1"), "{out}");
    let (_, out) = run(&["torsion", "bounds", "--graph", arg(&g), "--p", "2"]);
    assert!(out.contains("nu: [4, 4]"), "{out}");
    let (_, out) = run(&["auto", "welldef", "--graph", arg(&g), "--set", "a c", "--multiplier", "c"]);
    assert!(out.contains("well_defined: true"), "{out}");
    let (_, out) = run(&["graph", "cograph", "--graph", arg(&g)]);
    assert!(out.contains("group: Z x F_2"), "{out}");
}

#[test]
fn unknown_subcommand_fails() {
    let (code, _) = run(&["frobnicate"]);
    assert_ne!(code, 0);
}
