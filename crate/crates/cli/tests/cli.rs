// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use planted::detect::{dary_test, k_path_test, star_test, DetectionResult};
use planted::experiments::{format_csv, SweepConfig};
use planted::io::{load_edgelist, save_edgelist};
use planted::reconstruct::reconstruct_line;
use planted::rng::{split_seed, tag};
use planted::{plant, sample_er, Graph, Instance, PlantSpec};
use serde_json::Value;

fn planted_cmd() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_planted"));
    c.env_remove("PLANTED_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    planted_cmd().args(args).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_examples() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.el");
    let o = run(&["gen", "--n", "100", "--lambda", "0", "--plant", "line:5", "--seed", "1", "--out", p(&g)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&g).unwrap();
    assert_eq!(text.lines().next(), Some("100 4"));

    let o = run(&["gen", "--n", "10", "--lambda", "20", "--seed", "1", "--out", p(&g)]);
    assert_eq!(code(&o), 2);

    let t = dir.path().join("t.el");
    let o = run(&["gen", "--n", "20", "--plant", "dary:2,2", "--lambda", "0", "--seed", "3", "--out", p(&t)]);
    assert_eq!(code(&o), 0);
    let inst = load_edgelist(&t).unwrap();
    assert_eq!(inst.truth.unwrap().edges.len(), 6);
    assert_eq!(inst.graph.edge_count(), 6);

    assert_eq!(code(&run(&["gen", "--n", "20", "--plant", "tree:3", "--lambda", "0", "--out", p(&t)])), 2);
}

#[test]
fn gen_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.el");
    let o = run(&["gen", "--n", "3000", "--lambda", "1.3", "--plant", "star:6", "--seed", "42", "--out", p(&g)]);
    assert_eq!(code(&o), 0);
    let base = sample_er(3000, 1.3, 42).unwrap();
    let mut want = plant(&base, PlantSpec::Star { k: 6 }, split_seed(42, tag::PLANT, 0)).unwrap();
    want.seed = 42;
    want.lambda = 1.3;
    assert_eq!(load_edgelist(&g).unwrap(), want);
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.el");
    let b = dir.path().join("b.el");
    let o = planted_cmd()
        .env("PLANTED_SEED", "77")
        .args(["gen", "--n", "500", "--lambda", "2", "--seed", "1", "--out", p(&a)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["gen", "--n", "500", "--lambda", "2", "--seed", "77", "--out", p(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = planted_cmd()
        .env("PLANTED_SEED", "abc")
        .args(["gen", "--n", "5", "--lambda", "0", "--out", p(&a)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn detect_examples_match_library() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = dir.path().join("p.el");
    let inst = plant(&Graph::empty(30), PlantSpec::Line { k: 5 }, 9).unwrap();
    save_edgelist(&inst, &path5).unwrap();
    let o = run(&["detect", "--in", p(&path5), "--test", "kpath", "--K", "5"]);
    assert_eq!(code(&o), 0);
    let got: DetectionResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(got, k_path_test(&inst.graph, 5).unwrap());
    assert_eq!(got.decision, planted::detect::Decision::H1);

    let empty = dir.path().join("e.el");
    save_edgelist(&Instance::unplanted(Graph::empty(10), 0, 0.0), &empty).unwrap();
    let o = run(&["detect", "--in", p(&empty), "--test", "star", "--K", "1", "--expect", "H0"]);
    assert_eq!(code(&o), 0);
    let got: DetectionResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(got, star_test(&Graph::empty(10), 1).unwrap());

    assert_eq!(code(&run(&["detect", "--in", p(&empty), "--test", "dary", "--D", "2"])), 2);
    assert_eq!(code(&run(&["detect", "--in", p(&empty), "--test", "kpath"])), 2);
    let o = run(&["detect", "--in", p(&empty), "--test", "dary", "--D", "2", "--h", "1"]);
    let got: DetectionResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(got, dary_test(&Graph::empty(10), 2, 1).unwrap());
}

#[test]
fn expect_and_strict_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k9 = dir.path().join("k9.el");
    save_edgelist(&Instance::unplanted(Graph::complete(9), 0, 8.0), &k9).unwrap();
    assert_eq!(code(&run(&["detect", "--in", p(&k9), "--test", "star", "--K", "8", "--expect", "H0"])), 1);
    assert_eq!(code(&run(&["detect", "--in", p(&k9), "--test", "star", "--K", "8", "--expect", "H1"])), 0);
    // a tiny budget leaves the path statistic inexact
    let o = run(&["detect", "--in", p(&k9), "--test", "kpath", "--K", "9", "--budget", "3", "--strict"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["exact"], Value::Bool(false));
    let missing = dir.path().join("missing.el");
    assert_eq!(code(&run(&["detect", "--in", p(&missing), "--test", "star", "--K", "1"])), 2);
}

#[test]
fn auto_picks_path_test_when_sparse() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.el");
    let base = sample_er(5000, 0.5, 3).unwrap();
    save_edgelist(&Instance::unplanted(base, 3, 0.5), &g).unwrap();
    let o = run(&["detect", "--in", p(&g), "--test", "auto", "--K", "30"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["test"], "kpath");
}

#[test]
fn reconstruct_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.el");
    let base = sample_er(2000, 0.5, 5).unwrap();
    let inst = plant(&base, PlantSpec::Line { k: 40 }, 6).unwrap();
    save_edgelist(&inst, &g).unwrap();
    let o = run(&["reconstruct", "--in", p(&g), "--method", "line", "--K", "40"]);
    assert_eq!(code(&o), 0);
    let want = reconstruct_line(&inst.graph, 40).unwrap().scored(&inst.truth.unwrap().vertices);
    assert_eq!(stdout_json(&o), serde_json::to_value(&want).unwrap());
}

#[test]
fn theory_outputs() {
    let o = run(&["theory", "lambda_d", "--D", "1"]);
    assert_eq!(code(&o), 0);
    let l = stdout_json(&o)["lambda_d"].as_f64().unwrap();
    assert!((l - 1.0).abs() <= 1e-6);
    let o = run(&["theory", "line_threshold", "--lambda", "0.5", "--n", "100000"]);
    let t = stdout_json(&o)["line_threshold"].as_f64().unwrap();
    assert_eq!(t, planted::theory::line_threshold(0.5, 1e5).unwrap());
    assert_eq!(code(&run(&["theory", "dary_thresholds", "--D", "2", "--lambda", "4", "--n", "1000"])), 3);
    assert_eq!(code(&run(&["theory", "m0_eigensystem", "--lambda", "1"])), 3);
    assert_eq!(code(&run(&["theory", "psi", "--mu", "-1", "--D", "2"])), 2);
    let o = run(&["theory", "markov_bound", "--n", "1000", "--K", "10", "--lambda", "2"]);
    let report = planted::theory::markov_bound_e0l2(1000, 10, 2.0).unwrap();
    assert_eq!(stdout_json(&o), serde_json::to_value(&report).unwrap());
}

#[test]
fn verify_tiny_suite() {
    let o = run(&["verify", "--suite", "tiny"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], Value::Bool(true));
    for r in v["identity"].as_array().unwrap() {
        assert!(r["max_abs_error"].as_f64().unwrap() <= 1e-12);
    }
    for r in v["spectral"].as_array().unwrap() {
        assert!(r["max_residual"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.json");
    let cfg = r#"{"n": 2000, "lambdas": [0.4, 0.8], "sizes": [6, 14], "plant": "line",
                  "test": "kpath", "reconstructor": "line", "trials": 8, "master_seed": 11}"#;
    std::fs::write(&cfg_path, cfg).unwrap();
    let csv = dir.path().join("table.csv");
    let svg = dir.path().join("table.svg");
    let o = run(&["sweep", "--config", p(&cfg_path), "--out", p(&csv), "--svg", p(&svg), "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let parsed: SweepConfig = serde_json::from_str(cfg).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), format_csv(&parsed.run().unwrap()));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<rect").count(), 4);

    let o = run(&["sweep", "--config", p(&cfg_path), "--out", p(&csv), "--metric", "auc"]);
    assert_eq!(code(&o), 2);
    std::fs::write(&cfg_path, r#"{"n": 100, "lambdas": [], "sizes": [3], "plant": "line", "test": "kpath", "trials": 2}"#)
        .unwrap();
    assert_eq!(code(&run(&["sweep", "--config", p(&cfg_path), "--out", p(&csv)])), 2);
}
