use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn persuade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(args)
        .env_remove("PERSUADE_PACK")
        .output()
        .unwrap()
}

fn core_path(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn pack_check_accepts_the_shipped_pack() {
    let out = persuade(&["pack", "check", &core_path("packs/covid19.json")]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("ok: covid19"), "{stdout}");
}

#[test]
fn pack_check_reports_every_problem_and_fails() {
    let out = persuade(&["pack", "check", &core_path("tests/fixtures/broken/duplicate-option-id.json")]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("problem(s)"), "{stdout}");
    assert!(stdout.contains("duplicate"), "{stdout}");
}

#[test]
fn pack_check_on_missing_file_is_a_usage_error() {
    let out = persuade(&["pack", "check", "/nonexistent/pack.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = persuade(&[
        "simulate",
        "--profiles",
        "skeptic",
        "--runs",
        "20",
        "--seed",
        "9",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["runs"], 20);
    assert_eq!(json["violations"], 0);
    assert!(!out.stdout.is_empty());
}

#[test]
fn simulate_rejects_unknown_profiles() {
    let out = persuade(&["simulate", "--profiles", "nobody", "--runs", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skeptic"));
}

#[test]
fn repl_runs_from_stdin_and_saves_the_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let mut child = Command::new(env!("CARGO_BIN_EXE_persuade"))
        .args(["repl", "--seed", "3", "--profile", "neutral", "--transcript", path.to_str().unwrap()])
        .env_remove("PERSUADE_PACK")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"unsure\nno-idea\nno\ncannot\ndont-know\nno\nno\nno\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("-- end of session --"), "{stdout}");
    let t = persuade_core::session::Transcript::load(&path).unwrap();
    assert_eq!(t.header.seed, 3);
    persuade_core::session::replay(std::sync::Arc::new(persuade_core::pack::covid19()), &t).unwrap();
}
