//! End-to-end checks of the `gridtrail` binary: exit codes, output
//! stability, and the gen → verify → render round trip.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridtrail"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn gridtrail")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn gen_reports_optimality() {
    let out = run(&["gen", "-k", "2"]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("4 segments"), "got: {err}");
    assert!(err.contains("OPTIMAL (bound 4)"), "got: {err}");
}

#[test]
fn gen_rejects_k_zero() {
    let out = run(&["gen", "-k", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_json_is_byte_stable() {
    let a = run(&["gen", "-k", "3", "--json"]);
    let b = run(&["gen", "-k", "3", "--json"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "gen --json output not byte-stable");
}

#[test]
fn gen_verify_round_trip() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("c3.json");
    let out = run(&["gen", "-k", "3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = run(&["verify", path.to_str().unwrap()]);
    assert!(v.status.success(), "verify failed: {}", stderr(&v));

    // explicit wider extent is also accepted
    let v2 = run(&["verify", "--extent", "3,3,4", path.to_str().unwrap()]);
    assert!(v2.status.success());
}

#[test]
fn gen_phases_summary() {
    let out = run(&["gen", "-k", "3", "--phases"]);
    assert!(out.status.success());
    let err = stderr(&out);
    assert!(err.contains("phases: forward 1..4"), "got: {err}");
}

#[test]
fn search_exhaustive_none_then_found() {
    let none = run(&["search", "--grid", "3x3", "--budget", "3"]);
    assert_eq!(none.status.code(), Some(1));
    assert!(
        stdout(&none).contains("NONE (exhaustive over m=1,D=1)"),
        "got: {}",
        stdout(&none)
    );

    let found = run(&["search", "--grid", "3x3", "--budget", "4"]);
    assert!(found.status.success());
    assert!(
        stdout(&found).contains("FOUND 4 segments"),
        "got: {}",
        stdout(&found)
    );
}

#[test]
fn starts_map_k2() {
    let out = run(&["starts", "-k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("8 feasible of 9"), "got: {text}");
    assert!(text.contains("infeasible-over-lattice"), "got: {text}");
}

#[test]
fn bounds_table_k4() {
    let out = run(&["bounds", "-k", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.trim_start().starts_with('4'))
        .expect("k=4 row");
    for v in ["40", "37", "39", ">=3"] {
        assert!(row.contains(v), "row missing {v}: {row}");
    }
}

#[test]
fn render_counts_and_is_non_destructive() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("c2.json");
    assert!(run(&["gen", "-k", "2", "-o", path.to_str().unwrap()])
        .status
        .success());
    let before = std::fs::read(&path).expect("read trail");

    let svg_path = dir.path().join("c2.svg");
    let out = run(&[
        "render",
        path.to_str().unwrap(),
        "-o",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "render failed: {}", stderr(&out));
    let svg = std::fs::read_to_string(&svg_path).expect("read svg");
    assert_eq!(svg.matches("<circle").count(), 9, "expected 9 grid circles");
    assert_eq!(svg.matches("<text").count(), 4, "expected 4 numbered segments");

    let after = std::fs::read(&path).expect("re-read trail");
    assert_eq!(before, after, "render modified the trail file");
}

#[test]
fn render_layers_k3() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("c3.json");
    assert!(run(&["gen", "-k", "3", "-o", path.to_str().unwrap()])
        .status
        .success());
    let svg_path = dir.path().join("c3.svg");
    let out = run(&[
        "render",
        path.to_str().unwrap(),
        "--layers",
        "z",
        "-o",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "render failed: {}", stderr(&out));
    let svg = std::fs::read_to_string(&svg_path).expect("read svg");
    assert_eq!(
        svg.matches("<circle").count(),
        27,
        "expected 3 panels x 9 circles"
    );
}

#[test]
fn render_missing_file_is_usage_error() {
    assert!(!Path::new("definitely-missing.json").exists());
    let out = run(&["render", "definitely-missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tree_commands_verify() {
    let out = run(&["tree", "partial3"]);
    assert!(out.status.success(), "tree partial3: {}", stderr(&out));

    let full = run(&["tree", "full3"]);
    assert!(full.status.success(), "tree full3: {}", stderr(&full));

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("partial3.json");
    assert!(run(&["tree", "partial3", "--json", "-o", path.to_str().unwrap()])
        .status
        .success());
    let rep = run(&["tree", "replicate", path.to_str().unwrap()]);
    assert!(rep.status.success(), "replicate: {}", stderr(&rep));
    assert!(
        stdout(&rep).contains("bound 39") || stderr(&rep).contains("bound 39"),
        "replicate should report the 3n+3 bound; got: {} / {}",
        stdout(&rep),
        stderr(&rep)
    );
}
