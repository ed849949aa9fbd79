use std::path::Path;
use std::process::{Command, Output};

use skcw::experiments::ExperimentReport;
use skcw::randmat::SymMatrix;

fn skcw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skcw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identities_pass() {
    let o = skcw(&["identities", "--max-k", "30"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 5);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&skcw(&["--help"])), 0);
    assert_eq!(code(&skcw(&["clt", "--help"])), 0);
    assert_eq!(code(&skcw(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&skcw(&[])), 1);
    assert_eq!(code(&skcw(&["clt", "--bogus"])), 1);
    assert_eq!(code(&skcw(&["clt", "--reps", "many"])), 1);
    assert_eq!(code(&skcw(&["frobnicate"])), 1);
    assert_eq!(code(&skcw(&["cycles", "--n", "10", "--kmax", "3", "--reps", "5"])), 1);
}

#[test]
fn outside_high_temperature_is_rejected() {
    let o = skcw(&["clt", "--beta", "0.6", "--n", "8", "--reps", "20"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = skcw(&["decomposition", "--beta", "0.3", "--J", "2", "--n", "8", "--reps", "20"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn enumeration_bound_is_enforced() {
    let o = skcw(&["clt", "--n", "40", "--reps", "20"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn clt_report_round_trips_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let common = ["clt", "--n", "8", "--n-grid", "6", "--reps", "40", "--seed", "7"];
    for (out, threads) in [(&a, "1"), (&b, "2")] {
        let mut args = common.to_vec();
        args.extend(["--threads", threads, "--out", path_str(out)]);
        let o = skcw(&args);
        assert!(code(&o) == 0 || code(&o) == 2);
        assert!(String::from_utf8_lossy(&o.stdout).contains("clt.mean"));
    }
    let mut ra = ExperimentReport::from_json(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let mut rb = ExperimentReport::from_json(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert!(ra.generated_at_unix.is_some());
    ra.generated_at_unix = None;
    rb.generated_at_unix = None;
    assert_eq!(ra.to_json().unwrap(), rb.to_json().unwrap());
    assert_eq!(ra.config.params.n, 8);
    assert_eq!(ra.sizes.len(), 2);

    let again = dir.path().join("again.json");
    let o = skcw(&["report", "--in", path_str(&a), "--out", path_str(&again)]);
    assert!(code(&o) == 0 || code(&o) == 2);
    let rc = ExperimentReport::from_json(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(rc.sizes, ra.sizes);
    assert_eq!(rc.verdicts, ra.verdicts);
}

#[test]
fn csv_output_lists_raw_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = skcw(&[
        "cycles",
        "--n",
        "12",
        "--kmax",
        "3",
        "--reps",
        "25",
        "--format",
        "csv",
        "--out",
        path_str(&out),
    ]);
    assert!(code(&o) == 0 || code(&o) == 2);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,replicate,C1,C2,C3"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn sample_then_free_energy() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    let o = skcw(&[
        "sample",
        "--n",
        "6",
        "--seed",
        "3",
        "--stream",
        "1",
        "--out",
        path_str(&m),
    ]);
    assert_eq!(code(&o), 0);
    let a = SymMatrix::load(&m).unwrap();
    assert_eq!(a.n(), 6);

    let o = skcw(&["free-energy", "--matrix", path_str(&m), "--beta", "0.2", "--J", "0.5"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 6);
    let lz = v["log_partition"].as_f64().unwrap();
    assert!((v["free_energy"].as_f64().unwrap() - lz / 6.0).abs() < 1e-12);

    let o = skcw(&[
        "free-energy",
        "--n",
        "6",
        "--seed",
        "3",
        "--stream",
        "1",
        "--beta",
        "0.2",
        "--J",
        "0.5",
    ]);
    let w: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(w["log_partition"].as_f64().unwrap(), lz);

    assert_eq!(code(&skcw(&["free-energy", "--matrix", path_str(&m), "--n", "5"])), 1);
    assert_eq!(code(&skcw(&["free-energy"])), 1);
}

#[test]
fn tilted_sample_is_hollow_on_request() {
    let o = skcw(&[
        "sample",
        "--n",
        "5",
        "--tilted-beta",
        "0.3",
        "--sigma",
        "alternating",
        "--hollow",
    ]);
    assert_eq!(code(&o), 0);
    let a = SymMatrix::from_text(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(a.is_hollow());
    assert_eq!(
        code(&skcw(&[
            "sample",
            "--n",
            "5",
            "--tilted-beta",
            "0.3",
            "--sigma",
            "sideways"
        ])),
        1
    );
}

#[test]
fn missing_report_file_is_an_error() {
    assert_eq!(code(&skcw(&["report", "--in", "/nonexistent/report.json"])), 1);
}
