//! The `dlss` binary end to end: exit codes, output files, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn dlss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn simulate_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["simulate", "--N", "16", "--tau", "1e-6", "--t-end", "5e-6", "--out", out];
    v.extend_from_slice(extra);
    v
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&dlss(&["--help"])), 0);
    assert_eq!(code(&dlss(&["--version"])), 0);
    assert_eq!(code(&dlss(&["converge", "--help"])), 0);
}

#[test]
fn bad_arguments_exit_two() {
    for args in [
        &["simulate", "--tau", "0"][..],
        &["simulate", "--N", "2"],
        &["simulate", "--scheme", "euler"],
        &["decay", "--scheme", "bdf2-dvd", "--alpha", "1.1"],
        &["converge", "--tau-ref", "1e-6"],
        &["frobnicate"],
        &[],
    ] {
        let out = dlss(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?} printed to stdout");
    }
}

#[test]
fn every_scheme_simulates_and_writes_the_series() {
    let dir = tempfile::tempdir().unwrap();
    for scheme in ["bdf2-fd", "dvd", "bdf2-dvd", "bdf3-dvd"] {
        let path = dir.path().join(format!("{scheme}.csv"));
        let p = path.to_str().unwrap();
        let out = dlss(&simulate_args(p, &["--scheme", scheme]));
        assert_eq!(code(&out), 0, "{scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.starts_with(&format!("{scheme}: 6 records")), "{stdout}");

        let mut reader = csv::Reader::from_path(&path).unwrap();
        let headers = reader.headers().unwrap().clone();
        assert_eq!(&headers[0], "step");
        let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 6);
        if scheme == "bdf2-fd" {
            // evolves U^(alpha/2) directly; only the DVD schemes conserve mass
            continue;
        }
        let mass = headers.iter().position(|h| h == "mass").unwrap();
        let m0: f64 = rows[0][mass].parse().unwrap();
        for row in &rows {
            let m: f64 = row[mass].parse().unwrap();
            assert!((m - m0).abs() <= 1e-12 * m0, "{scheme}: mass {m} vs {m0}");
        }
    }
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let extra = ["--scheme", "bdf3-dvd", "--normalize"];
    let first = dlss(&simulate_args(a.to_str().unwrap(), &extra));
    let second = dlss(&simulate_args(b.to_str().unwrap(), &extra));
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(read(&a), read(&b));
}

#[test]
fn decay_reports_both_fits() {
    let out = dlss(&["decay", "--N", "16", "--tau", "1e-5", "--t-end", "2e-4", "--initial", "constant:1"]);
    // a constant datum has nothing to decay: a zero series cannot be fitted
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonpositive"));

    let out = dlss(&["decay", "--scheme", "bdf2-fd", "--alpha", "1.2", "--N", "32", "--tau", "1e-5", "--t-end", "1e-3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("Fd: decay slope -"), "{stdout}");
    assert!(stdout.contains("Erel_1.2: decay slope -"), "{stdout}");
}

#[test]
fn converge_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = dlss(&[
        "converge",
        "--scheme",
        "bdf2-fd",
        "--N",
        "16",
        "--t-cmp",
        "4e-5",
        "--tau-list",
        "4e-6,2e-6,1e-6",
        "--tau-ref",
        "5e-8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&path);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,error");
    assert_eq!(lines.len(), 4);
    assert!(String::from_utf8(out.stdout).unwrap().contains("bdf2-fd: convergence rate"));
}

#[test]
fn selfcheck_passes() {
    let out = dlss(&["selfcheck", "--seed", "11"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 6);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
}
