use std::path::Path;
use std::process::{Command, Output};

fn monolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monolab")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn run_writes_report_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let plots = dir.path().join("plots");
    let o = monolab(&[
        "run",
        &fixture("acceptance.scene"),
        "--out",
        out.to_str().unwrap(),
        "--plot",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], "monolab-report/1");
    assert_eq!(report["seed"], 0);
    assert_eq!(report["scene_hash"].as_str().unwrap().len(), 64);
    assert_eq!(std::fs::read_dir(&plots).unwrap().count(), 7);
}

#[test]
fn example_sum_scene_reports_both_witnesses() {
    let o = monolab(&["run", &fixture("example35.scene")]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &report["requests"];
    assert_eq!(r[0]["status"], "FAIL");
    assert_eq!(r[0]["verdict"]["witness"]["kind"], "extension");
    assert_eq!(r[1]["verdict"]["witness"]["kind"], "coderivative");
    assert_eq!(r[1]["verdict"]["witness"]["value"], -1.0);
    assert_eq!(r[0]["revalidated"], true);
    assert_eq!(r[1]["revalidated"], true);
}

#[test]
fn parse_errors_exit_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.scene");
    std::fs::write(&p, "[operator A]\nsum = A B\n").unwrap();
    let o = monolab(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 7: UNKNOWN_OPERATOR"), "{err}");
}

#[test]
fn request_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p3.scene");
    std::fs::write(&p, "[norm]\np = 3\n[operator A]\ncatalog = identity\n[analysis]\nrun = psd_criterion\nop = A\nx = 0\nv = 0\n").unwrap();
    let o = monolab(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_is_an_internal_error() {
    let o = monolab(&["run", "/nonexistent/scene"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn timing_adds_wall_clock() {
    let o = monolab(&["run", &fixture("example35.scene"), "--timing"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["requests"][0]["wall_clock"].is_number());
}

#[test]
fn catalog_commands() {
    let o = monolab(&["catalog", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 13);
    let o = monolab(&["catalog", "show", "normal_cone_halfline"]);
    assert_eq!(o.status.code(), Some(0));
    let e: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(e["name"], "normal_cone_halfline");
    assert_eq!(monolab(&["catalog", "show", "nope"]).status.code(), Some(1));
}
