use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seqeffects"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&out)]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

const PQ: &str = r#"{
  "version": 1,
  "dim": 2,
  "effects": {
    "P": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    "Q": [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]]
  },
  "states": {
    "plus": [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]]
  }
}"#;

#[test]
fn gen_writes_validating_deterministic_files() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["povm", "--dim", "2", "--m", "2", "--seed", "7"]);
    let b = gen(&dir, "b.json", &["povm", "--dim", "2", "--m", "2", "--seed", "7"]);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["povms"]["X"].as_array().unwrap().len(), 2);

    for kind in ["effect", "density", "pvm"] {
        gen(&dir, &format!("{kind}.json"), &[kind, "--dim", "3"]);
    }
    assert_eq!(code(&run(&["gen", "povm", "--dim", "0"])), 2);
    assert_eq!(code(&run(&["gen", "pvm", "--dim", "2", "--parts", "5"])), 2);
    assert_eq!(code(&run(&["gen", "bogus"])), 2);
    let unwritable = path(&dir, "missing/dir/x.json");
    assert_eq!(code(&run(&["gen", "effect", "--out", s(&unwritable)])), 3);
}

#[test]
fn check_compatible_pair_is_consistent() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "pair.json", &["commuting-pair", "--dim", "3", "--m", "2", "--n", "3", "--seed", "1"]);
    let x = format!("{}#X", s(&p));
    let y = format!("{}#Y", s(&p));
    let o = run(&["check", &x, &y]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["compatible"], true);
    assert_eq!(r["criterion2"]["verdict"], true);
    assert_eq!(r["criterion3"]["verdict"], true);
    assert!(r["violations"].as_array().unwrap().is_empty());

    // Output is a pure function of inputs and flags.
    assert_eq!(run(&["check", &x, &y]).stdout, o.stdout);
    let cfg = &json(&o)["config"];
    assert_eq!(cfg["tolerances"]["mat_eq"], 1e-9);
}

#[test]
fn check_non_commuting_pair() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "pq.json");
    std::fs::write(&f, PQ).unwrap();
    let x = format!("{}#P", s(&f));
    let y = format!("{}#Q", s(&f));
    let w = format!("{}#plus", s(&f));
    let o = run(&["check", &x, &y, "--state", &w, "--c", "0.7", "--xi0-arg", "0.6283"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["compatible"], false);
    assert_eq!(r["criterion1"]["verdict"], false);
    assert_eq!(r["criterion2"]["verdict"], false);
    assert_eq!(r["criterion3"]["verdict"], false);
    let at_state = r["criterion2_at_state"]["max_residual"].as_f64().unwrap();
    assert!((at_state - 0.5).abs() < 1e-12);
}

#[test]
fn check_input_errors() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["povm", "--dim", "2"]);
    let b = gen(&dir, "b.json", &["povm", "--dim", "3"]);
    assert_eq!(code(&run(&["check", s(&a), s(&b)])), 2);
    let garbage = path(&dir, "garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(code(&run(&["check", s(&garbage), s(&a)])), 2);
    let missing = path(&dir, "missing.json");
    assert_eq!(code(&run(&["check", s(&missing), s(&a)])), 3);
    assert_eq!(code(&run(&["check", &format!("{}#nope", s(&a)), s(&a)])), 2);
}

#[test]
fn verify_runs_suites() {
    let o = run(&["verify", "--trials", "30"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["passed"], true);
    assert_eq!(r["suites"].as_array().unwrap().len(), 3);

    let o = run(&["verify", "--trials", "20", "--c", "0.7", "--xi0-arg", "0.6283", "--dim", "2"]);
    assert_eq!(code(&o), 0);

    let o = run(&["verify", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    for suite in json(&o)["report"]["suites"].as_array().unwrap() {
        assert!(suite["properties"].as_array().unwrap().is_empty());
    }
}

#[test]
fn simulate_diagonal_fixture() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "diag.json");
    std::fs::write(
        &f,
        r#"{"version": 1, "dim": 2,
            "povms": {
              "X": [[[[0.25, 0], [0, 0]], [[0, 0], [0.5, 0]]], [[[0.75, 0], [0, 0]], [[0, 0], [0.5, 0]]]],
              "Y": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]
            },
            "states": {"W": [[[0.4, 0], [0, 0]], [[0, 0], [0.6, 0]]]}}"#,
    )
    .unwrap();
    let x = format!("{}#X", s(&f));
    let y = format!("{}#Y", s(&f));
    let o = run(&["simulate", &x, &y, s(&f), "--trials", "20000", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    let exact: Vec<Vec<f64>> = serde_json::from_value(r["exact"].clone()).unwrap();
    let expected = [[0.1, 0.3], [0.3, 0.3]];
    let mut total = 0.0;
    for k in 0..2 {
        for j in 0..2 {
            assert!((exact[k][j] - expected[k][j]).abs() < 1e-12);
            total += exact[k][j];
        }
    }
    assert!((total - 1.0).abs() < 1e-12);
    assert!(r["max_abs_z"].as_f64().unwrap() < 5.0);

    let o = run(&["simulate", &x, &y, s(&f), "--trials", "1"]);
    let counts: Vec<Vec<u64>> = serde_json::from_value(json(&o)["report"]["counts"].clone()).unwrap();
    assert_eq!(counts.iter().flatten().sum::<u64>(), 1);

    assert_eq!(code(&run(&["simulate", &x, &y, s(&f), "--trials", "0"])), 2);
}

#[test]
fn search_reports_witness_and_replays() {
    let o = run(&["search", "--trials", "10", "--seed", "4", "--dim", "3"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert!(r["fixed_state_witness"]["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["best_residual_trajectory"].as_array().unwrap().len(), 10);
    assert_eq!(run(&["search", "--trials", "10", "--seed", "4", "--dim", "3"]).stdout, o.stdout);

    let o = run(&["search", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert!(r["best_all_state"].is_null());
    assert!(r["fixed_state_witness"].is_object());

    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "no/such/dir.json");
    assert_eq!(code(&run(&["search", "--trials", "1", "--out", s(&bad)])), 3);
}
