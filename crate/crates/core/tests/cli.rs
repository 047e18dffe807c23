// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stimresp::cli::report::Report;
use stimresp::lgs_corpus::FILES;
use stimresp::Status;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stimresp"));
    c.env("STIMRESP_COLOR", "never");
    c
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn check_json(model: &str, extra: &[&str]) -> (i32, Report) {
    let m = corpus().join(model);
    let r = corpus().join("lgs.reqs");
    let mut args = vec!["check", path(&m), path(&r), "--format", "json"];
    args.extend_from_slice(extra);
    let o = run(&args);
    (o.status.code().unwrap(), Report::from_json(&stdout(&o)).unwrap())
}

/// Compares against a stored report; `STIMRESP_BLESS=1` rewrites it.
fn golden(name: &str, report: &Report) {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = report.without_timing().to_json();
    if std::env::var_os("STIMRESP_BLESS").is_some() {
        std::fs::write(&file, &got).unwrap();
    }
    let want = std::fs::read_to_string(&file).unwrap();
    assert_eq!(got.trim_end(), want.trim_end(), "golden {name} differs");
}

#[test]
fn fixed_model_passes() {
    let (code, report) = check_json("lgs_fixed.asm", &[]);
    assert_eq!(code, 0);
    assert!(report.all_pass());
    assert_eq!(report.verdicts.len(), 6);
    golden("lgs_fixed.json", &report);
}

#[test]
fn original_model_fails_r11_bis() {
    let (code, report) = check_json("lgs_original.asm", &[]);
    assert_eq!(code, 1);
    let failing: Vec<_> = report
        .verdicts
        .iter()
        .filter(|v| v.status != Status::Pass)
        .map(|v| v.name.as_str())
        .collect();
    assert_eq!(failing, ["r11_bis"]);
    golden("lgs_original.json", &report);
}

#[test]
fn json_report_round_trips() {
    let (_, report) = check_json("lgs_original.asm", &[]);
    assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
}

#[test]
fn text_report_lists_every_requirement() {
    let m = corpus().join("lgs_original.asm");
    let r = corpus().join("lgs.reqs");
    let o = run(&["check", path(&m), path(&r)]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("r11_bis")));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert!(text.contains("step 0 | env: - | state: handle=down, door=closed, gear=extended"));
}

#[test]
fn req_filter_and_step_override() {
    let (code, report) = check_json("lgs_original.asm", &["--req", "r12_bis"]);
    assert_eq!(code, 0);
    assert_eq!(report.verdicts.len(), 1);
    assert_eq!(report.verdicts[0].name, "r12_bis");

    let (code, report) = check_json("lgs_fixed.asm", &["--max-steps", "2"]);
    assert_eq!(code, 1);
    assert!(report.verdicts.iter().any(|v| v.status == Status::Fail));

    let m = corpus().join("lgs_fixed.asm");
    let r = corpus().join("lgs.reqs");
    let o = run(&["check", path(&m), path(&r), "--req", "nonexistent"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn all_states_flag() {
    let (code, report) = check_json("lgs_fixed.asm", &["--all-states"]);
    assert_eq!(code, 1);
    assert!(report.verdicts.iter().all(|v| v.states_checked == 32));
}

#[test]
fn worker_count_does_not_change_the_report() {
    let (_, one) = check_json("lgs_original.asm", &["--workers", "1"]);
    let (_, four) = check_json("lgs_original.asm", &["--workers", "4"]);
    assert_eq!(one.without_timing().to_json(), four.without_timing().to_json());
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.asm", "domain D {a b} var x: D controlled init {x=c} main skip");
    let r = corpus().join("lgs.reqs");
    let o = run(&["check", path(&bad), path(&r)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.asm:1:"));

    let missing = dir.path().join("missing.asm");
    assert_eq!(run(&["check", path(&missing), path(&r)]).status.code(), Some(2));
    assert_eq!(run(&["reach", path(&missing)]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let m = corpus().join("lgs_fixed.asm");
    let reqs = write(dir.path(), "bad.reqs", "req r stability k=3 stimulus (handle = up) response (door = closed)");
    assert_eq!(run(&["check", path(&m), path(&reqs)]).status.code(), Some(2));
}

#[test]
fn simulate_runs_a_script() {
    let dir = tempfile::tempdir().unwrap();
    let m = corpus().join("lgs_fixed.asm");
    let empty = write(dir.path(), "empty.txt", "");
    let o = run(&["simulate", path(&m), path(&empty)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "step 0 | env: - | state: handle=down, door=closed, gear=extended\n");

    let script = write(dir.path(), "up.txt", "handle=up\n-\n");
    let o = run(&["simulate", path(&m), path(&script)]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "step 1 | env: handle=up | state: handle=up, door=opening, gear=extended");

    let controlled = write(dir.path(), "door.txt", "door=open\n");
    assert_eq!(run(&["simulate", path(&m), path(&controlled)]).status.code(), Some(2));
    assert_eq!(run(&["simulate", path(&m), path(&empty), "--init", "3"]).status.code(), Some(2));
}

#[test]
fn simulate_reports_a_crash() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "clash.asm",
        "domain D {a b} var h: D monitored var x: D controlled init {h=a x=a}\n\
         main if h = b then par { x := a x := b } end",
    );
    let script = write(dir.path(), "s.txt", "h=a\nh=b\nh=a\n");
    let o = run(&["simulate", path(&m), path(&script)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.ends_with("step 2 | env: h=b | crash: conflicting parallel updates to `x`\n"), "{out}");
}

#[test]
fn reach_prints_states() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "skip.asm", "domain D {a b} var x: D controlled init {x=b} main skip");
    let o = run(&["reach", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "reachable states: 1\nx=b\n");

    let o = run(&["reach", path(&corpus().join("lgs_original.asm")), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["count"], 11);

    let crash = write(
        dir.path(),
        "crash.asm",
        "domain D {a b} var x: D controlled init {x=a} main par { x := a x := b }",
    );
    let o = run(&["reach", path(&crash)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("crash: conflicting parallel updates to `x`"));
}

#[test]
fn corpus_export_matches_bundled_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    for (name, src) in FILES {
        assert_eq!(std::fs::read_to_string(dir.path().join(name)).unwrap(), src);
        assert_eq!(std::fs::read_to_string(corpus().join(name)).unwrap(), src);
    }
}
