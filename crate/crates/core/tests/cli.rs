use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmod"))
        .args(args)
        .env_remove("KMOD_DEFAULT_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const E11: &str = r#"{"d":2,"m":2,"entries":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#;
const E22: &str = r#"{"d":2,"m":2,"entries":[[[0,0],[0,0]],[[0,0],[1,0]]]}"#;

#[test]
fn element_is_parallel_to_itself() {
    let dir = TempDir::new().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        r#"{"d":1,"m":2,"entries":[[[1,2],[3,-1]]]}"#,
    );
    let out = kmod(&["check-parallel", s(&x), s(&x), "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn disjoint_diagonal_units() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "e11.json", E11);
    let b = write(dir.path(), "e22.json", E22);
    let out = kmod(&["check-parallel", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], false);
    // ‖e11 + λ e22‖ = max(1, |λ|) ≥ 1, so the pair is orthogonal
    let out = kmod(&["check-bj", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["certificate"]["kind"], "birkhoff-james");
    let out = kmod(&["witness", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "good.json", E11);
    let bad = write(dir.path(), "bad.json", r#"{"d":2,"m":2,"entries":[[[1,0]]"#);
    let out = kmod(&["check-parallel", s(&good), s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));

    let shape = write(
        dir.path(),
        "shape.json",
        r#"{"d":2,"m":2,"entries":[[[1,0]],[[0,0]]]}"#,
    );
    assert_eq!(
        kmod(&["check-bj", s(&good), s(&shape)]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("absent.json");
    assert_eq!(
        kmod(&["check-bj", s(&good), s(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(kmod(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn generated_pairs_round_trip_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let out = kmod(&[
        "gen",
        "--kind",
        "parallel-pair",
        "--seed",
        "5",
        "--d",
        "2",
        "--m",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let pair = stdout_json(&out);
    let x = write(dir.path(), "x.json", &pair["x"].to_string());
    let y = write(dir.path(), "y.json", &pair["y"].to_string());
    let out = kmod(&["witness", s(&x), s(&y)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], true);

    let file = dir.path().join("e.json");
    let a = kmod(&["gen", "--seed", "9", "--out", s(&file)]);
    assert_eq!(a.status.code(), Some(0));
    let b = kmod(&["gen", "--seed", "9"]);
    assert_eq!(std::fs::read(&file).unwrap(), b.stdout);
}

#[test]
fn operator_checks() {
    let dir = TempDir::new().unwrap();
    let id = write(
        dir.path(),
        "id.json",
        r#"{"d":2,"m":2,"A":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#,
    );
    let out = kmod(&["op-check", s(&id), "--identity"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["certificate"]["kind"], "identity");

    let out = kmod(&["op-check", s(&id), s(&id)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_json(&out)["certificate"]["kind"],
        "operator-basic-vector"
    );

    // a nilpotent shift is not parallel to the identity: ‖N + λI‖ < 1 + |λ|
    let n = write(
        dir.path(),
        "n.json",
        r#"{"d":1,"m":2,"A":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#,
    );
    assert_eq!(
        kmod(&["op-check", s(&n), "--identity"]).status.code(),
        Some(1)
    );
    assert_eq!(kmod(&["op-check", s(&n)]).status.code(), Some(2));
}

#[test]
fn tolerance_default_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let x = write(dir.path(), "x.json", E11);
    let out = Command::new(env!("CARGO_BIN_EXE_kmod"))
        .args(["check-parallel", s(&x), s(&x)])
        .env("KMOD_DEFAULT_TOL", "0.001")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["tol"], 0.001);
    let out = kmod(&["check-parallel", s(&x), s(&x), "--tol", "1e-5"]);
    assert_eq!(stdout_json(&out)["tol"], 1e-5);
}

#[test]
fn suite_subcommands() {
    let out = kmod(&["suite", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let names = String::from_utf8(out.stdout).unwrap();
    assert!(names.lines().any(|l| l == "parallel-def-eig"));

    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let out = kmod(&[
        "suite",
        "run",
        "--trials",
        "5",
        "--properties",
        "parallel-def-eig,rank-one-model",
        "--out",
        s(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["properties"].as_object().unwrap().len(), 2);

    assert_eq!(
        kmod(&["suite", "run", "--properties", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(kmod(&["suite", "run", "--d", "0"]).status.code(), Some(2));
}
