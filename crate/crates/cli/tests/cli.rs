use std::path::Path;
use std::process::{Command, Output};

fn fracmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmax")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn grid(dir: &Path) -> (String, String) {
    let (space, field) = (path(dir, "grid.txt"), path(dir, "u.txt"));
    let out = fracmax(&[
        "gallery",
        "--kind",
        "grid1d",
        "--h",
        "0.05",
        "--extent",
        "1",
        "--out",
        &space,
        "--field-out",
        &field,
        "--function",
        "bump",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (space, field)
}

#[test]
fn maxfn_matches_oracle_output() {
    let dir = tempfile::tempdir().unwrap();
    let (space, field) = grid(dir.path());
    let (fast, slow) = (path(dir.path(), "fast.csv"), path(dir.path(), "slow.csv"));
    assert!(fracmax(&["maxfn", "--space", &space, "--field", &field, "--alpha", "0.5", "--out", &fast])
        .status
        .success());
    assert!(fracmax(&["maxfn", "--space", &space, "--field", &field, "--alpha", "0.5", "--oracle", "--out", &slow])
        .status
        .success());
    assert_eq!(std::fs::read(fast).unwrap(), std::fs::read(slow).unwrap());
}

#[test]
fn oracle_limit_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let (space, field) = grid(dir.path());
    let out = fracmax(&[
        "maxfn",
        "--space",
        &space,
        "--field",
        &field,
        "--oracle",
        "--oracle-limit",
        "5",
        "--out",
        &path(dir.path(), "m.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle"));
}

#[test]
fn canonical_gradient_passes_its_check() {
    let dir = tempfile::tempdir().unwrap();
    let (space, field) = grid(dir.path());
    let g = path(dir.path(), "g.txt");
    assert!(fracmax(&["gradient", "canonical", "--space", &space, "--field", &field, "--s", "1", "--out", &g])
        .status
        .success());
    let ok = fracmax(&["gradient", "check", "--space", &space, "--field", &field, "--grad", &g, "--s", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    let tight =
        fracmax(&["gradient", "check", "--space", &space, "--field", &field, "--grad", &g, "--s", "1", "--C", "0.1"]);
    assert_eq!(tight.status.code(), Some(2));
}

#[test]
fn seminorm_reports_family() {
    let dir = tempfile::tempdir().unwrap();
    let (space, field) = grid(dir.path());
    let out = fracmax(&[
        "seminorm",
        "--space",
        &space,
        "--field",
        &field,
        "--family",
        "bmo",
        "--out",
        &path(dir.path(), "b.csv"),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("bmo "));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "r.csv");
    let consistent = fracmax(&["verify", "--experiment", "thm41", "--h-ladder", "0.04,0.02,0.01", "--out", &csv]);
    assert_eq!(consistent.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&consistent.stdout).starts_with("thm41: consistent"));
    let rejected = fracmax(&["verify", "--experiment", "thm41", "--p", "1", "--out", &csv]);
    assert_eq!(rejected.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("p>1"));
    let short = fracmax(&["verify", "--experiment", "thm41", "--h-ladder", "0.02", "--out", &csv]);
    assert_eq!(short.status.code(), Some(3));
}

#[test]
fn empty_ladder_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "r.csv");
    fracmax(&["verify", "--experiment", "thm41", "--h-ladder", "", "--out", &csv]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("experiment,quantity,h,"));
}

#[test]
fn missing_input_is_an_error() {
    let out =
        fracmax(&["decay", "fit", "--space", "/nonexistent/space.txt", "--variant", "lower", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
