use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqecc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn steane_distance_is_three() {
    let o = run(&["verify", "--code", config("steane.code").to_str().unwrap(), "--check", "distance"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn wrong_expected_distance_exits_one() {
    let o = run(&["verify", "--code", config("four_qubit.code").to_str().unwrap(), "--check", "distance", "--expect", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plan_prints_bundle() {
    let o = run(&["plan", "--rate", "0.5", "--gamma", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma2"].as_f64(), Some(0.0625));
    assert!((v["private_rate"].as_f64().unwrap() - 8.0 / 15.0).abs() < 1e-12);
    assert_eq!(v["singleton"]["ok"].as_bool(), Some(true));
}

#[test]
fn zero_trials_give_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--config", config("empty.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("trial,seed,weight,support,key,syndrome,outcome"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["trials"].as_u64(), Some(0));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.code");
    std::fs::write(&path, "schema = 1\nextra = 2\n[field]\np = 2\n[code]\ntype = \"steane\"\n").unwrap();
    let o = run(&["verify", "--code", path.to_str().unwrap(), "--check", "distance"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&path, "schema = 3\n[field]\np = 2\n[code]\ntype = \"steane\"\n").unwrap();
    assert_eq!(run(&["verify", "--code", path.to_str().unwrap(), "--check", "distance"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn simulation_is_deterministic_across_threads() {
    let cfg = config("private.toml");
    let a = run(&["--format", "csv", "--threads", "1", "simulate", "--config", cfg.to_str().unwrap(), "--trials", "300"]);
    let b = run(&["--format", "csv", "--seed", "1", "simulate", "--config", cfg.to_str().unwrap(), "--trials", "300"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 301);
    let c = run(&["--format", "csv", "--seed", "2", "simulate", "--config", cfg.to_str().unwrap(), "--trials", "300"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn oracles_pass_on_shipped_files() {
    for (file, check) in [("ptc.code", "ptc-eps"), ("rss.code", "rss-privacy"), ("ael.code", "pseudorandom")] {
        let o = run(&["verify", "--code", config(file).to_str().unwrap(), "--check", check]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["verify", "--code", config("qgrs7.code").to_str().unwrap(), "--check", "qld", "--ell", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn construct_roundtrips_through_explicit_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--config", config("qgrs7.code").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let explicit = dir.path().join("qgrs7.explicit.code");
    let o = run(&["verify", "--code", explicit.to_str().unwrap(), "--check", "distance"]);
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn decode_lists_single_qubit_error() {
    let o = run(&["decode", "--code", config("steane.code").to_str().unwrap(), "--syndrome", "1,0,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["list_size"].as_u64(), Some(1));
    assert_eq!(v["list"][0]["min_weight"].as_u64(), Some(1));
}

#[test]
fn bound_rejects_dimension_above_singleton() {
    assert_eq!(run(&["bound", "--n", "100", "--delta", "0.1", "--k", "80"]).status.code(), Some(0));
    assert_eq!(run(&["bound", "--n", "100", "--delta", "0.1", "--k", "81"]).status.code(), Some(1));
}
