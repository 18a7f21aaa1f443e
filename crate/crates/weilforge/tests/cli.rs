//! Black-box tests of the command-line interface: reference outputs,
//! exit codes, table building/resuming, and verification of both table
//! files and certificate files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn wf() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weilforge"));
    c.env_remove("WEILFORGE_TABLE");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    wf()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// One shared table file (max 459), built once per test binary.
fn shared_table_file() -> &'static PathBuf {
    static FIXTURE: OnceLock<(TempDir, PathBuf)> = OnceLock::new();
    let (_, path) = FIXTURE.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("shared_table.jsonl");
        let out = run(
            &["table", "--max", "459", "--out", path.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "fixture build failed: {}", stderr_of(&out));
        assert_eq!(stdout_of(&out), "entries=230\n");
        (dir, path)
    });
    path
}

#[test]
fn order_two_matches_reference_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["order", "2", "--count", "1"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout_of(&out),
        "m=2 n=1 g=3 R(x) = x^6 - 2*x^5 + x^4 + 2*x^2 - 8*x + 8\n"
    );
}

#[test]
fn order_rejects_nonpositive_m() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["order", "0"], dir.path())), 2);
    assert_eq!(code(&run(&["order", "-3"], dir.path())), 2);
    assert_eq!(code(&run(&["order", "2", "--n-max", "0"], dir.path())), 2);
}

#[test]
fn order_json_output_verifies_as_certificate_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["order", "2", "--count", "2", "--format", "json"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 2);

    let path = dir.path().join("certs.json");
    std::fs::write(&path, &text).unwrap();
    let out = run(&["verify", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "certificates=2\n");
}

#[test]
fn verify_rejects_tampered_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["order", "4", "--count", "1", "--format", "json"], dir.path());
    assert_eq!(code(&out), 0);
    let mut parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let n = parsed[0]["n"].as_u64().unwrap();
    parsed[0]["n"] = serde_json::json!(n + 1);
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, parsed.to_string()).unwrap();
    let out = run(&["verify", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("certificate 0"));
}

#[test]
fn order_budget_exhaustion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["order", "2", "--count", "99", "--n-max", "4"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(stderr_of(&out).contains("budget exhausted"));
    // Partial results still go to stdout.
    assert!(stdout_of(&out).starts_with("m=2 n=1 g=3"));
}

#[test]
fn family_reference_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["family", "f", "--n", "2"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "x^4 - 8*x^3 + 16*x^2 - 8*x + 1\n");

    let out = run(&["family", "h", "--n", "1", "--m", "2"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "x^3 - 7*x^2 + 10*x - 2\n");
}

#[test]
fn family_flag_misuse_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    // hprime needs 2-adic valuation at least 4; v2(8) = 3.
    assert_eq!(
        code(&run(&["family", "hprime", "--n", "1", "--m", "8"], dir.path())),
        2
    );
    assert_eq!(code(&run(&["family", "g", "--n", "3"], dir.path())), 2);
    assert_eq!(
        code(&run(&["family", "f", "--n", "2", "--k", "1"], dir.path())),
        2
    );
    assert_eq!(
        code(&run(&["family", "h", "--n", "1", "--m", "0"], dir.path())),
        2
    );
}

#[test]
fn naf_reference_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["naf", "7"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "digits=[-1,0,0,1] k=3\n");

    let out = run(&["naf", "7", "--format", "json"], dir.path());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["digits"], serde_json::json!([-1, 0, 0, 1]));
    assert_eq!(parsed["k"], serde_json::json!(3));

    assert_eq!(code(&run(&["naf", "0"], dir.path())), 2);
}

#[test]
fn table_output_verifies_cleanly() {
    let path = shared_table_file();
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "entries=230\n");
}

#[test]
fn verify_rejects_corrupted_table() {
    let src = shared_table_file();
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(src).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut first: serde_json::Value = serde_json::from_str(&lines[0]).unwrap();
    let q = first["quality7"].as_u64().unwrap();
    first["quality7"] = serde_json::json!(q + 50);
    lines[0] = first.to_string();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let out = run(&["verify", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "no_such_file.jsonl"], dir.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn compliant_reads_table_from_environment() {
    let path = shared_table_file();
    let dir = tempfile::tempdir().unwrap();
    let out = wf()
        .args(["compliant", "15"])
        .env("WEILFORGE_TABLE", path)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.starts_with("m=15 "), "{text}");
    assert!(text.contains("quality7="), "{text}");

    // Even orders have no compliant representation.
    let out = run(&["compliant", "16"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn order_accepts_explicit_table_flag() {
    let path = shared_table_file();
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "order",
            "15",
            "--count",
            "1",
            "--table",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert!(stdout_of(&out).starts_with("m=15 "));
}

#[test]
fn table_resumes_from_existing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let out = run(
        &["table", "--max", "101", "--out", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "entries=51\n");
    let first = std::fs::read(&path).unwrap();

    let out = run(
        &["table", "--max", "201", "--out", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "entries=101\n");
    let second = std::fs::read(&path).unwrap();
    assert!(
        second.starts_with(&first),
        "resumed table must keep existing entries verbatim"
    );
}

#[test]
fn table_output_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let out = run(
        &["table", "--max", "301", "--out", a.to_str().unwrap(), "--jobs", "1"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = run(
        &["table", "--max", "301", "--out", b.to_str().unwrap(), "--jobs", "4"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
