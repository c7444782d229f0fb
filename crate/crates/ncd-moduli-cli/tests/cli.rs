use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ncd_moduli::fixtures;
use ncd_moduli::maptype::MapType;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncd-moduli"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child =
        bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().expect("spawn");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn emit(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let o = run(&["example", name, "--emit", path.to_str().unwrap()]);
    assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

fn envelope(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], "ncd-moduli/1");
    assert_eq!(v["command"], args[0]);
    v["result"].clone()
}

#[test]
fn every_fixture_validates() {
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures::names() {
        let path = emit(dir.path(), name);
        let o = run(&["validate", &path]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert!(stdout(&o).starts_with("ok:"));
    }
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures::names() {
        let path = emit(dir.path(), name);
        let text = std::fs::read_to_string(&path).unwrap();
        let mt: MapType = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&mt).unwrap() + "\n";
        assert_eq!(text, again, "{name}");
        assert_eq!(stdout(&run(&["example", name])), text);
    }
}

#[test]
fn json_example_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "neck2");
    let file: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(envelope(&["example", "neck2"]), file);
}

#[test]
fn piped_strata_counts() {
    let fixture = run(&["example", "ex0-n3"]);
    let o = run_stdin(&["strata", "-", "--k", "2"], &fixture.stdout);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "{3, 6, 3}");
    let all = run_stdin(&["strata", "-"], &fixture.stdout);
    assert_eq!(stdout(&all), "k=1: {3, 3, 6}\nk=2: {3, 6, 3}\nk=3: {1, 3, 0}\n");
}

#[test]
fn strata_from_poset() {
    let poset = br#"{"dimX": 4, "components": ["D1", "D2"], "intersections": [{"components": ["D1", "D2"], "count": 2}]}"#;
    let o = run_stdin(&["--json", "strata", "-", "--k", "2"], poset);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["counts"]["resolution_of_vk"], 2);
}

#[test]
fn building_square_classes() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "ex4dim");
    let r = envelope(&["building", &path, "--m", "2"]);
    assert_eq!(r["counts"]["classes_by_depth"]["2"], 4);
    let multi = envelope(&["building", &path, "--multi", "1,2"]);
    assert_eq!(multi["levels"], serde_json::json!([1, 2]));
    assert_eq!(multi["counts"]["classes_by_depth"]["2"], 2);
}

#[test]
fn neck1b_levels() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "neck1b");
    let text = stdout(&run(&["levels", &path]));
    assert!(text.contains("torus_dim: 1"), "{text}");
    let r = envelope(&["levels", &path]);
    assert_eq!(r["torus_dim"], 1);
    assert_eq!(r["feasible"], true);
    assert_eq!(r["relations"], serde_json::json!(["beta2 - beta1 = 0"]));
    assert_eq!(envelope(&["dim", &path])["codim"], 2);
}

#[test]
fn neck2_relation_is_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "neck2");
    let r = envelope(&["levels", &path]);
    assert_eq!(r["relations"], serde_json::json!(["beta[V2,1] - 2*beta[V1,1] = 0"]));
}

#[test]
fn dim_from_flags() {
    let r = envelope(&["dim", "--c1A", "3", "--dimX", "4", "--chi", "2", "--ell", "1", "--AV", "3"]);
    assert_eq!(r["expected_dim"], 0);
    let neg = envelope(&["dim", "--c1A", "1", "--dimX", "8", "--chi", "-2", "--ell", "0", "--AV", "0"]);
    assert_eq!(neg["expected_dim"], 0);
    let o = run(&["dim", "--c1A", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let odd = run(&["dim", "--c1A", "3", "--dimX", "5", "--chi", "2", "--ell", "1", "--AV", "3"]);
    assert_eq!(odd.status.code(), Some(2));
}

#[test]
fn glue_counts_and_conflicts() {
    let ok = br#"{"levels": 1, "nodes": [{"name": "z", "directions": [
        {"s": 3, "p": {"primes": {"2": "1"}, "arg": "0"}, "l_minus": 1, "l_plus": 1}]}],
        "lambda": [{"primes": {}, "arg": "0"}]}"#;
    let o = run_stdin(&["glue", "-"], ok);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("total: 3"));
    let clash = br#"{"levels": 1, "nodes": [{"name": "z", "directions": [
        {"s": 2, "p": {"primes": {}, "arg": "0"}, "l_minus": 1, "l_plus": 1},
        {"s": 2, "p": {"primes": {}, "arg": "1/2"}, "l_minus": 1, "l_plus": 1}]}],
        "lambda": [{"primes": {}, "arg": "0"}]}"#;
    assert_eq!(run_stdin(&["glue", "-"], clash).status.code(), Some(1));
    let short = br#"{"levels": 2, "nodes": [], "lambda": []}"#;
    assert_eq!(run_stdin(&["glue", "-"], short).status.code(), Some(2));
}

#[test]
fn violations_exit_one() {
    let mut mt = fixtures::fixture("neck3").unwrap();
    for c in &mut mt.components {
        c.trivial = true;
    }
    let text = serde_json::to_string(&mt).unwrap();
    let o = run_stdin(&["validate", "-"], text.as_bytes());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation:"));
    assert!(!o.stderr.is_empty());
    let j = run_stdin(&["--json", "validate", "-"], text.as_bytes());
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["result"]["valid"], false);
}

#[test]
fn malformed_input_exits_two() {
    for input in [&b"{"[..], b"[]", b"{\"divisor\": 3}", b"\xff\xfe"] {
        let o = run_stdin(&["validate", "-"], input);
        assert_eq!(o.status.code(), Some(2), "{input:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    assert_eq!(run(&["levels", "/definitely/not/here.json"]).status.code(), Some(2));
    assert_eq!(run(&["example", "ex9"]).status.code(), Some(2));
    assert_eq!(run_stdin(&["strata", "-", "--k", "7"], &run(&["example", "ex0-n2"]).stdout).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_two() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&[]).status.code(), Some(2));
}
