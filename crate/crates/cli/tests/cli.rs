use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const COMMANDS: [&str; 8] = [
    "validate",
    "fixed-points",
    "dual",
    "xi-matrix",
    "stab",
    "intertwiner-check",
    "interface-check",
    "loop-xi",
];

const EXAMPLES: [&str; 3] = ["tp1", "tp2", "rank2"];

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypertoric")).current_dir(root()).args(args).output().expect("binary runs")
}

fn example(name: &str) -> String {
    format!("examples/{name}.json")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

/// Set `HYPERTORIC_UPDATE_GOLDEN=1` to rewrite the expected reports.
#[test]
fn golden_reports() {
    let update = std::env::var_os("HYPERTORIC_UPDATE_GOLDEN").is_some();
    for name in EXAMPLES {
        for cmd in COMMANDS {
            let out = run(&[cmd, "--input", &example(name), "--format", "json"]);
            let path = root().join(format!("examples/expected/{name}.{cmd}.json"));
            if update {
                std::fs::write(&path, &out.stdout).unwrap();
                continue;
            }
            let expected = std::fs::read(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&expected), "{name} {cmd}");
            let code = out.status.code().unwrap();
            let pass = json(&out)["pass"].as_bool().unwrap();
            assert_eq!(code, if pass { 0 } else { 1 }, "{name} {cmd}");
        }
    }
}

#[test]
fn envelope_shape() {
    for cmd in COMMANDS {
        let v = json(&run(&[cmd, "--input", &example("tp1"), "--format", "json"]));
        assert_eq!(v["command"], cmd);
        assert_eq!(v["input_hash"].as_str().unwrap().len(), 64);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["name"].is_string() && c["pass"].is_boolean()));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["validate", "--input", &example("tp1")]).status.code(), Some(0));
    for bad in ["tests/fixtures/malformed.json", "tests/fixtures/garbage.json", "tests/fixtures/missing.json"] {
        let out = run(&["validate", "--input", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["validate", "--input", "tests/fixtures/not_unimodular.json", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["xi-matrix", "--input", "tests/fixtures/not_unimodular.json"]).status.code(), Some(2));
    assert_eq!(run(&["stab", "--input", &example("tp1"), "--slope", "1/3"]).status.code(), Some(2));
    assert_eq!(run(&["stab", "--input", &example("tp2"), "--zeta", "1"]).status.code(), Some(2));
    assert_eq!(run(&["loop-xi", "--input", &example("tp1"), "--q-order", "0"]).status.code(), Some(2));
    assert_eq!(run(&["intertwiner-check", "--input", &example("tp1"), "--slope", "1/3,0"]).status.code(), Some(2));
}

#[test]
fn xi_matrix_on_tp2() {
    let out = run(&["xi-matrix", "--input", &example("tp2"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "entries").unwrap();
    let table = entries["detail"].as_array().unwrap();
    assert_eq!(table.len(), 9);
    assert_eq!(table.iter().filter(|e| e["zero"] == true).count(), 3);
}

#[test]
fn deterministic_and_seeded() {
    let a = run(&["stab", "--input", &example("tp2"), "--seed", "11", "--format", "json"]);
    let b = run(&["stab", "--input", &example("tp2"), "--seed", "11", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["checks"][0]["detail"]["seed"], 11);
    let c = run(&["stab", "--input", &example("tp2"), "--seed", "12", "--format", "json"]);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn explicit_slopes_and_zeta() {
    let out = run(&["stab", "--input", &example("tp2"), "--slope", "1/7,2/7,2/7", "--zeta", "2,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let human = String::from_utf8(out.stdout).unwrap();
    assert!(human.contains("result: pass"));
    let out = run(&[
        "intertwiner-check",
        "--input",
        &example("tp1"),
        "--slope",
        "1/3,0",
        "--slope-dual",
        "1/5,-2/5",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let off = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "offdiagonal_limits").unwrap();
    assert_eq!(off["pass"], true);
}

#[test]
fn loop_series_dump() {
    let out = run(&["loop-xi", "--input", &example("tp1"), "--q-order", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let series = v["checks"][0]["detail"]["series"].as_str().unwrap();
    assert!(series.ends_with("O(q^3)"), "{series}");
}
