//! End-to-end exit-code and output tests of the `blockverify` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockverify"))
}

fn lesson(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../lessons")
        .join(format!("{name}.blocks.json"))
        .to_string_lossy()
        .into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_increment_passes() {
    let out = bin()
        .args([
            "run",
            &lesson("increment"),
            "--entry",
            "increment",
            "--args",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("result: 4"));
}

#[test]
fn run_increment_precondition_violation() {
    let out = bin()
        .args([
            "run",
            &lesson("increment"),
            "--entry",
            "increment",
            "--args",
            "-1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("precondition violated"), "{text}");
    assert!(text.contains("slot 1"), "{text}");
}

#[test]
fn run_missing_file_is_usage_error() {
    let out = bin()
        .args(["run", "/no/such/file.blocks.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_list_argument_and_json_format() {
    let out = bin()
        .args([
            "run",
            &lesson("max_of_list"),
            "--entry",
            "maxOfList",
            "--format",
            "json",
            "--args",
            "[3,1,4]",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["outcome"], "passed");
    assert_eq!(doc["result"], 4);
}

#[test]
fn run_depth_limit_flag() {
    let out = bin()
        .args([
            "run",
            &lesson("fib"),
            "--entry",
            "fib",
            "--depth-limit",
            "3",
            "--args",
            "9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("E_STACK_OVERFLOW"));
}

#[test]
fn check_accepts_typed_lesson_and_rejects_dynamic_typing() {
    let ok = bin()
        .args(["check", &lesson("increment")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("ok"));

    let bad = bin()
        .args(["check", &lesson("dynamic_typing")])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("E_DYNAMIC_TYPING"));
}

#[test]
fn compile_matches_golden_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let bpl = dir.path().join("increment.bpl");
    let out = bin()
        .args(["compile", &lesson("increment"), "--out"])
        .arg(&bpl)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let golden =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../lessons/expected/increment.bpl");
    assert_eq!(
        std::fs::read_to_string(&bpl).unwrap(),
        std::fs::read_to_string(golden).unwrap()
    );
    assert!(dir.path().join("increment.srcmap.json").is_file());
}

#[test]
fn compile_rejected_program_exits_one() {
    let out = bin()
        .args(["compile", &lesson("dynamic_typing")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compile_unwritable_output_is_usage_error() {
    let out = bin()
        .args([
            "compile",
            &lesson("increment"),
            "--out",
            "/no/such/dir/x.bpl",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_skip_solver_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", &lesson("increment"), "--skip-solver", "--out"])
        .arg(dir.path().join("inc.bpl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("solver skipped"));
}

#[test]
fn verify_missing_solver_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify",
            &lesson("increment"),
            "--boogie-path",
            "/no/such/boogie",
            "--out",
        ])
        .arg(dir.path().join("inc.bpl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[cfg(unix)]
fn stub_solver(dir: &std::path::Path, script_body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join("boogie-stub.sh");
    std::fs::write(&path, format!("#!/bin/sh\n{script_body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

#[cfg(unix)]
#[test]
fn verify_with_stub_solver_verified() {
    let dir = tempfile::tempdir().unwrap();
    let stub = stub_solver(
        dir.path(),
        "echo 'Boogie program verifier finished with 1 verified, 0 errors'",
    );
    let out = bin()
        .args(["verify", &lesson("increment"), "--boogie-path"])
        .arg(&stub)
        .arg("--out")
        .arg(dir.path().join("inc.bpl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("verified (1 procedure)"));
}

#[cfg(unix)]
#[test]
fn verify_with_stub_solver_error_maps_to_post_slot() {
    let dir = tempfile::tempdir().unwrap();
    // Line 7 of the golden increment.bpl is the ensures clause.
    let stub = stub_solver(
        dir.path(),
        "echo 'inc.bpl(10,3): Error: A postcondition might not hold on this return path.'\n\
         echo 'inc.bpl(7,3): Related location: This is the postcondition that might not hold.'\n\
         echo 'Boogie program verifier finished with 0 verified, 1 error'",
    );
    let out = bin()
        .args(["verify", &lesson("bug_post"), "--boogie-path"])
        .arg(&stub)
        .arg("--out")
        .arg(dir.path().join("inc.bpl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("E_VERIFY_POST"), "{text}");
    assert!(text.contains("increment#0"), "{text}");
}

#[cfg(unix)]
#[test]
fn verify_with_garbage_solver_output_is_tool_failure() {
    let dir = tempfile::tempdir().unwrap();
    let stub = stub_solver(dir.path(), "echo 'kaboom'");
    let out = bin()
        .args(["verify", &lesson("increment"), "--boogie-path"])
        .arg(&stub)
        .arg("--out")
        .arg(dir.path().join("inc.bpl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn usage_error_for_unknown_subcommand() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
