use std::path::Path;
use std::process::{Command, Output};

use owf_core::io::read_layout;

fn owf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_owf"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn gen(dir: &Path, rows: &str, cols: &str) {
    let out = owf(dir, &["gen", "--rows", rows, "--cols", cols, "--spacing", "900", "--seed", "3", "--jitter", "80", "--out", "farm.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "3", "4");
    let out = owf(dir.path(), &["solve", "farm.json", "--out", "res"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["layout.json", "iterations.csv", "iterations.json", "layout.svg"] {
        assert!(dir.path().join("res").join(f).exists(), "{f} missing");
    }
    let layout = read_layout(&dir.path().join("res/layout.json")).unwrap();
    assert!(layout.validate.is_empty());
    assert_eq!(layout.layout.arcs.len(), 12);
    let csv = std::fs::read_to_string(dir.path().join("res/iterations.csv")).unwrap();
    assert!(csv.starts_with("phase,k,upsilon,ct1_s,ct2_s,objective,gap_pct,recalculated_gap_pct,status,gap_unmet"));
    assert!(csv.lines().nth(1).unwrap().starts_with("feasibility,1,"));

    let out = owf(dir.path(), &["verify", "farm.json", "res/layout.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok:"));
}

#[test]
fn verify_flags_tampered_layout() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "2", "3");
    assert!(owf(dir.path(), &["feasibility", "farm.json", "--out", "f.json"]).status.success());
    let mut text = std::fs::read_to_string(dir.path().join("f.json")).unwrap();
    // Claim one extra turbine on the first arc.
    let file = read_layout(&dir.path().join("f.json")).unwrap();
    let k = file.layout.arcs[0].k;
    text = text.replacen(&format!("\"k\": {k}"), &format!("\"k\": {}", k + 1), 1);
    std::fs::write(dir.path().join("bad.json"), text).unwrap();
    let out = owf(dir.path(), &["verify", "farm.json", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("load_mismatch"));
}

#[test]
fn input_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"nodes\": []}").unwrap();
    assert_eq!(owf(dir.path(), &["solve", "bad.json"]).status.code(), Some(4));
    assert_eq!(owf(dir.path(), &["solve", "missing.json"]).status.code(), Some(4));
}

#[test]
fn costs_and_mps_exports() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "2", "3");
    let out = owf(dir.path(), &["costs", "farm.json", "--dump-costs", "c.csv", "--upsilon", "2"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.lines().count() > 10);

    let out = owf(dir.path(), &["export-mps", "farm.json", "--upsilon", "3", "--out", "m.mps"]);
    assert!(out.status.success());
    let out = owf(dir.path(), &["solve-mps", "m.mps", "m.sol"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "optimal");
    let sol = std::fs::read_to_string(dir.path().join("m.sol")).unwrap();
    assert!(sol.contains("_objective="));

    let zero = owf(dir.path(), &["export-mps", "farm.json", "--upsilon", "3", "--zero-costs"]);
    assert!(zero.status.success());
    let text = String::from_utf8_lossy(&zero.stdout);
    assert!(text.starts_with("NAME"));
    assert!(!text.lines().any(|l| l.contains(" obj ") && !l.trim_end().ends_with(" 0")));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = owf(dir.path(), &["gen", "--rows", "3", "--cols", "3", "--seed", "5", "--jitter", "40"]);
    let b = owf(dir.path(), &["gen", "--rows", "3", "--cols", "3", "--seed", "5", "--jitter", "40"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
