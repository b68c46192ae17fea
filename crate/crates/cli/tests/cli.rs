//! End-to-end tests for the command-line harness: subcommand output files
//! and the exit-code contract (0 success, 1 usage/config, 2 data,
//! 3 verification discrepancies).

use std::process::Command;

use tempfile::TempDir;

fn partum() -> Command {
    Command::new(env!("CARGO_BIN_EXE_partum"))
}

#[test]
fn generate_cohort_writes_csv_and_schema() {
    let dir = TempDir::new().unwrap();
    let out = partum()
        .args(["generate-cohort", "--rows", "40", "--seed", "3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("cohort.csv").exists());
    assert!(dir.path().join("schema.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("cohort.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41); // header + 40 rows
}

#[test]
fn run_protocol_then_rerender_report() {
    let dir = TempDir::new().unwrap();
    let out = partum()
        .args(["run-protocol", "--seed", "5", "--folds", "5"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = dir.path().join("report.json");
    assert!(json.exists());

    let out = partum()
        .arg("report")
        .arg(&json)
        .args(["--format", "markdown-table"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("report.md").exists());
}

#[test]
fn verify_paper_exits_3_on_discrepancies() {
    // The embedded fixture is known to disagree with some published
    // statistics, so verification always reports discrepancies.
    let out = partum().arg("verify-paper").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[DISCREPANCY]"));
    assert!(stdout.contains("[PASS]"));
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn usage_errors_exit_1() {
    let out = partum().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = partum()
        .args(["run-protocol", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "malformed config should exit 1");
}

#[test]
fn missing_report_input_exits_2() {
    let out = partum()
        .args(["report", "/nonexistent/report.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_0() {
    assert!(partum().arg("--help").output().unwrap().status.success());
    assert!(partum().arg("--version").output().unwrap().status.success());
}
