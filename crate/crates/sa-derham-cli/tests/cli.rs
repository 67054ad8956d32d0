use std::path::{Path, PathBuf};
use std::process::Command;

use sa_derham_cli::error::CliError;
use sa_derham_cli::scene::Scene;
use sa_derham_cli::{run, RunOptions};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sa-derham"))
}

fn write_scene(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scene.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn empty_scene_exits_zero_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "{}");
    let out = dir.path().join("out");
    let status = binary().arg("--scene").arg(&scene).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(out.join("report.csv")).unwrap(), "task,check,value,tolerance,pass\n");
}

#[test]
fn unit_interval_scene_passes_with_small_stokes_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&RunOptions { scene: bundled("unit-interval-stokes.json"), out: Some(dir.path().into()), ..Default::default() }).unwrap();
    assert!(summary.pass());
    let stokes = summary.reports.iter().find(|r| r.name == "stokes").unwrap();
    assert_eq!(stokes.checks.len(), 2);
    for c in &stokes.checks {
        assert!(c.value <= 1e-9, "{} = {}", c.name, c.value);
    }
    let csv = std::fs::read_to_string(dir.path().join("stokes.csv")).unwrap();
    assert!(csv.starts_with("task,check,value,tolerance,pass\nstokes,residual_whole,"));
}

#[test]
fn circle_scene_finds_one_loop() {
    let summary = run(&RunOptions { scene: bundled("square-boundary-circle.json"), ..Default::default() }).unwrap();
    assert!(summary.pass());
    let coh = summary.reports.iter().find(|r| r.name == "circle_cohomology").unwrap();
    let value = |name: &str| coh.checks.iter().find(|c| c.name == name).unwrap().value;
    assert_eq!(value("betti_1"), 1.0);
    assert!((value("pairing_loop_counterclockwise") - 1.0).abs() <= 1e-8);
}

#[test]
fn parse_errors_carry_the_line() {
    let err = Scene::parse("{\n  \"seed\": 1,\n  \"complexes\": [\n}").unwrap_err();
    match err {
        CliError::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("unexpected {other}"),
    }
    let dir = tempfile::tempdir().unwrap();
    let scene = write_scene(dir.path(), "{ \"tasks\": [ { \"kind\": \"no-such-task\" } ] }");
    let output = binary().arg("--scene").arg(&scene).arg("--out").arg(dir.path().join("out")).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 1"));
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(matches!(Scene::parse("{ \"sed\": 3 }"), Err(CliError::Parse { .. })));
    let task = r#"{ "tasks": [ { "kind": "integrate", "form": "a", "chain": "b", "expectd": 1 } ] }"#;
    assert!(matches!(Scene::parse(task), Err(CliError::Parse { .. })));
}

#[test]
fn unresolved_references_fail_at_load() {
    let text = r#"{ "tasks": [ { "kind": "integrate", "form": "missing", "chain": "also_missing" } ] }"#;
    assert!(matches!(Scene::parse(text), Err(CliError::Unresolved { .. })));
    let text = r#"{ "complexes": { "k": { "builtin": "subdivision", "of": "nowhere" } } }"#;
    assert!(matches!(Scene::parse(text), Err(CliError::Unresolved { kind: "complex", .. })));
    let text = r#"{ "complexes": { "a": { "builtin": "subdivision", "of": "b" }, "b": { "builtin": "subdivision", "of": "a" } } }"#;
    assert!(matches!(Scene::parse(text), Err(CliError::Invalid { .. })));
}

#[test]
fn tight_tolerance_fails_but_still_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = binary()
        .arg("--scene")
        .arg(bundled("unit-interval-stokes.json"))
        .arg("--out")
        .arg(&out)
        .args(["--tol", "arctan_one.pairing=0"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("arctan_one,pairing,") && l.ends_with(",false")));
    assert!(out.join("report.txt").exists());
}

#[test]
fn task_filter_selects_by_name_and_kind() {
    let options = |tasks: &[&str]| RunOptions {
        scene: bundled("unit-interval-stokes.json"),
        tasks: tasks.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    let names: Vec<String> = run(&options(&["poincare", "stokes"])).unwrap().reports.into_iter().map(|r| r.name).collect();
    assert_eq!(names, ["stokes", "primitives", "primitives_star"]);
}

#[test]
fn library_failures_become_failing_checks() {
    let text = r#"{
      "complexes": { "k": { "builtin": "standard_simplex", "n": 1 } },
      "functions": { "x": { "domain": "k", "polynomial": { "1": 1 } } },
      "forms": { "dx": { "domain": "k", "degree": 1, "terms": [ { "generator": ["x", "x"] } ] } },
      "tasks": [ { "name": "wrong_shape", "kind": "extend", "shape": "sphere", "faces": ["dx"] } ]
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let summary = run(&RunOptions { scene: write_scene(dir.path(), text), ..Default::default() }).unwrap();
    let report = &summary.reports[0];
    assert!(!report.pass());
    assert_eq!(report.checks[0].name, "error");
    assert!(report.notes[0].contains("sphere"));
}

#[test]
fn quadrature_task_covers_dimension_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{ "tasks": [ { "kind": "quadrature", "max_dim": 0, "max_degree": 4 } ] }"#;
    let summary = run(&RunOptions { scene: write_scene(dir.path(), text), ..Default::default() }).unwrap();
    assert!(summary.pass());
    let text = r#"{ "tasks": [ { "kind": "quadrature", "max_dim": 1, "max_degree": 4 } ] }"#;
    let summary = run(&RunOptions { scene: write_scene(dir.path(), text), ..Default::default() }).unwrap();
    let worst = summary.reports[0].checks.iter().map(|c| c.value).fold(0.0, f64::max);
    assert!(worst <= 1e-14, "{worst}");
}

#[test]
fn malformed_tolerance_is_a_load_error() {
    let err = run(&RunOptions { scene: bundled("unit-interval-stokes.json"), tol: vec!["pairing".into()], ..Default::default() });
    assert!(matches!(err, Err(CliError::Tolerance(_))));
}
