//! End-to-end tests of the `pcmk` binary: reports, determinism, and the
//! documented behavior of every subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pcmk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcmk"))
}

fn run(args: &[&str]) -> Output {
    pcmk().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 report")
}

fn write_problem(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "pcmk-test-{}-{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SINGLE_ATOM: &str = r#"
version = "1"

[cone]
dim = 2
normals = [[0.0, -1.0], [-1.0, 0.0]]

[weight]
kind = "height-power"
q = 1.5

[[measure]]
direction = [-0.7071067811865476, -0.7071067811865476]
mass = 1.0
"#;

const Q2_BODY: &str = r#"
version = "1"

[cone]
dim = 2
normals = [[0.0, -1.0], [-1.0, 0.0]]

[weight]
kind = "height-power"
q = 1.5

[body]
directions = [[-0.7071067811865476, -0.7071067811865476]]
support = [1.0]
"#;

#[test]
fn solve_single_atom_closed_form() {
    let dir = tempdir();
    let problem = write_problem(&dir, "single.toml", SINGLE_ATOM);
    let out = run(&["solve", problem.to_str().unwrap(), "--no-timing"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Value = toml::from_str(&stdout_str(&out)).expect("report parses");
    let solution = &report["solution"];
    assert_eq!(solution["converged"].as_bool(), Some(true));
    let h = solution["support"].as_array().unwrap()[0].as_float().unwrap();
    assert!((h - 4.0).abs() <= 1e-8 * 4.0, "support {h}");
    assert!(solution["max_residual"].as_float().unwrap() <= 1e-8);
    assert!(report.get("timing_seconds").is_none());
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempdir();
    let problem = write_problem(&dir, "det.toml", SINGLE_ATOM);
    let a = run(&["solve", problem.to_str().unwrap(), "--seed", "7", "--no-timing"]);
    let b = run(&["solve", problem.to_str().unwrap(), "--seed", "7", "--no-timing"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "identical inputs and seed must give identical bytes");
    // With timing the field is present and the rest still parses.
    let c = run(&["solve", problem.to_str().unwrap()]);
    let parsed: toml::Value = toml::from_str(&stdout_str(&c)).unwrap();
    assert!(parsed.get("timing_seconds").is_some());
}

#[test]
fn evaluate_reports_measure_and_both_covolumes() {
    let dir = tempdir();
    let problem = write_problem(&dir, "body.toml", Q2_BODY);
    let out = run(&["evaluate", problem.to_str().unwrap(), "--no-timing", "--tighten"]);
    assert!(out.status.success());
    let report: toml::Value = toml::from_str(&stdout_str(&out)).unwrap();
    let s = report["surface_measure"]["masses"].as_array().unwrap()[0]
        .as_float()
        .unwrap();
    assert!((s - 2.0).abs() < 1e-9, "S {s}");
    let ve = report["covolume"]["euler"].as_float().unwrap();
    let vr = report["covolume"]["radial"].as_float().unwrap();
    assert!((ve - 4.0).abs() < 1e-8, "euler {ve}");
    assert!((vr - 4.0).abs() < 1e-8, "radial {vr}");
}

#[test]
fn evaluate_refuses_euler_for_slack_body_without_tighten() {
    let dir = tempdir();
    // Second direction slack at h = 0.1.
    let slack = r#"
version = "1"

[cone]
dim = 2
normals = [[0.0, -1.0], [-1.0, 0.0]]

[weight]
kind = "height-power"
q = 1.5

[body]
directions = [
  [-0.7071067811865476, -0.7071067811865476],
  [-0.4472135954999579, -0.8944271909999159],
]
support = [1.0, 0.1]
"#;
    let problem = write_problem(&dir, "slack.toml", slack);
    let out = run(&["evaluate", problem.to_str().unwrap(), "--no-timing"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let report: toml::Value = toml::from_str(&text).unwrap();
    let refused = report["covolume"]["euler_refused"].as_str().unwrap();
    assert!(refused.contains("tighten"), "message: {refused}");
    assert!(report["covolume"].get("radial").is_some());
    assert!(report["covolume"].get("euler").is_none());
    // With --tighten the euler route is reported.
    let out = run(&["evaluate", problem.to_str().unwrap(), "--no-timing", "--tighten"]);
    let report: toml::Value = toml::from_str(&stdout_str(&out)).unwrap();
    assert!(report["covolume"].get("euler").is_some());
}

#[test]
fn demo_nonuniqueness_writes_svg_with_two_boundaries() {
    let dir = tempdir();
    let problem = write_problem(&dir, "demo.toml", SINGLE_ATOM);
    let svg_path = dir.join("pair.svg");
    let out = run(&[
        "demo-nonuniqueness",
        problem.to_str().unwrap(),
        "--no-timing",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: toml::Value = toml::from_str(&stdout_str(&out)).unwrap();
    let t0 = report["pair"]["t0"].as_float().unwrap();
    assert!((t0 - 4.0).abs() <= 1e-10, "t0 {t0}");
    assert_eq!(report["pair"]["verified"].as_bool(), Some(true));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn demo_nonuniqueness_3d_report_only() {
    let dir = tempdir();
    let problem = write_problem(
        &dir,
        "demo3.toml",
        r#"
version = "1"

[cone]
dim = 3
normals = [
  [0.7071067811865476, 0.0, -0.7071067811865476],
  [-0.7071067811865476, 0.0, -0.7071067811865476],
  [0.0, 0.7071067811865476, -0.7071067811865476],
  [0.0, -0.7071067811865476, -0.7071067811865476],
]

[weight]
kind = "height-power"
q = 2.5
"#,
    );
    let svg_path = dir.join("pair3.svg");
    let out = run(&[
        "demo-nonuniqueness",
        problem.to_str().unwrap(),
        "--no-timing",
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: toml::Value = toml::from_str(&stdout_str(&out)).unwrap();
    let t0 = report["pair"]["t0"].as_float().unwrap();
    assert!((t0 - 16.0).abs() <= 1e-6, "t0 {t0}");
    assert!(!svg_path.exists(), "no SVG for n = 3");
}

#[test]
fn verify_suites_pass_on_seeded_fixtures() {
    let dir = tempdir();
    let problem = write_problem(&dir, "verify.toml", SINGLE_ATOM);
    for suite in ["gradient", "continuity", "lemma71", "lemma72"] {
        let out = run(&[
            "verify",
            problem.to_str().unwrap(),
            "--suite",
            suite,
            "--seed",
            "1",
        ]);
        let text = stdout_str(&out);
        assert!(
            out.status.success(),
            "suite {suite} failed:\n{text}\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(text.contains("PASS"), "suite {suite} output:\n{text}");
        assert!(!text.contains("FAIL"), "suite {suite} output:\n{text}");
    }
    // Monte Carlo suite with a reduced sample count for test speed.
    let out = run(&[
        "verify",
        problem.to_str().unwrap(),
        "--suite",
        "mc",
        "--seed",
        "3",
        "--samples",
        "200000",
    ]);
    let text = stdout_str(&out);
    assert!(out.status.success(), "mc suite:\n{text}");
    assert!(text.contains("mc-covolume"));
    let out = run(&["verify", problem.to_str().unwrap(), "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_report_to_out_path() {
    let dir = tempdir();
    let problem = write_problem(&dir, "out.toml", SINGLE_ATOM);
    let report_path = dir.join("report.toml");
    let out = run(&[
        "solve",
        problem.to_str().unwrap(),
        "--no-timing",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&report_path).unwrap();
    let report: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(report["command"].as_str(), Some("solve"));
}
