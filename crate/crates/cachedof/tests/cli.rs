//! End-to-end checks of the command-line binary: output stability, the
//! CSV contract, and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cachedof"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn dof_reports_fig_values() {
    let out = run(&[
        "dof", "--kt", "16", "--kr", "16", "--mut", "0.5", "--mur", "0.0625", "--alpha", "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["achievable_centralized"], 9.0);
    assert_eq!(v["upper_bound"], 9.6);
}

#[test]
fn invalid_config_exits_2() {
    let out = run(&["dof", "--kt", "2", "--kr", "2", "--mut", "0.01", "--mur", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn schedule_oracle_matches_and_is_deterministic() {
    let args = [
        "schedule", "--kt", "2", "--kr", "2", "--f", "4", "--mut", "0.5", "--mur", "0.5",
        "--alpha", "0.5", "--oracle",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().contains("verdict: MATCH"));

    let seeded = [
        "schedule", "--kt", "2", "--kr", "2", "--f", "4", "--mut", "0.5", "--mur", "0.5",
        "--alpha", "0.5", "--scheme", "decentralized", "--seed", "7",
    ];
    assert_eq!(run(&seeded).stdout, run(&seeded).stdout);
}

#[test]
fn schedule_oracle_too_large_exits_3() {
    let out = run(&[
        "schedule", "--kt", "2", "--kr", "4", "--f", "8", "--mut", "0.5", "--mur", "0.0",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn schedule_full_caches_zero_blocks() {
    let out = run(&[
        "schedule", "--kt", "2", "--kr", "2", "--f", "4", "--mut", "0.5", "--mur", "1.0",
        "--alpha", "0.5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("blocks: P=0 N=0"));
    assert!(text.contains("H=0"));
}

#[test]
fn tradeoff_csv_contract() {
    let out = run(&[
        "tradeoff", "--kt", "8", "16", "--kr", "16", "--mut", "0.5", "--mur", "0.0625",
        "--points", "101",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha_bar,delta_r,scheme,kt,kr,mut,mur"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 404); // 2 kt x 2 schemes x 101 points
    // alpha_bar = 0 rows need no extra cache
    for row in rows.iter().filter(|r| r.starts_with("0,")) {
        assert_eq!(row.split(',').nth(1), Some("0"));
    }
}

#[test]
fn verify_pinelis_suite_passes() {
    let out = run(&["verify", "--suite", "pinelis", "--k-max", "16"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("pinelis: PASS"));
}

#[test]
fn verify_unknown_suite_exits_2() {
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn montecarlo_contract() {
    let out = run(&[
        "montecarlo", "--kt", "2", "--kr", "2", "--f", "100", "--mut", "0.5", "--mur", "0.0",
        "--alpha", "0", "--trials", "4", "--seed", "1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["stderr"], 0.0);
    assert_eq!(v["trials"], 4);

    let bad = run(&[
        "montecarlo", "--kt", "2", "--kr", "2", "--mut", "0.5", "--mur", "0.0", "--trials", "0",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
