//! Runs the bundled acceptance scene and reports one line per criterion.

use std::path::Path;
use std::time::Duration;

use sa_derham_cli::tasks::TaskReport;
use sa_derham_cli::{run, RunOptions, RunSummary};

struct Criterion {
    number: usize,
    title: &'static str,
    task: &'static str,
    time_limit: Option<Duration>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, title: "boundary of boundary vanishes", task: "boundary", time_limit: Some(Duration::from_secs(5)) },
    Criterion { number: 2, title: "Stokes for polynomial and rational generators", task: "stokes", time_limit: Some(Duration::from_secs(30)) },
    Criterion { number: 3, title: "dt/t pairs to ln 2 and spans a class", task: "dt_over_t", time_limit: None },
    Criterion { number: 4, title: "Poincare primitives on the tetrahedron", task: "poincare", time_limit: Some(Duration::from_secs(60)) },
    Criterion { number: 5, title: "cross products, twist and wedge", task: "products", time_limit: None },
    Criterion { number: 6, title: "fiber integration identities", task: "bundles", time_limit: Some(Duration::from_secs(60)) },
    Criterion { number: 7, title: "Mayer-Vietoris on the square boundary", task: "mayer_vietoris", time_limit: None },
    Criterion { number: 8, title: "extension formulas restrict correctly", task: "extension", time_limit: None },
    Criterion { number: 9, title: "quadrature exactness through dim 3, degree 6", task: "quadrature", time_limit: None },
];

fn scene() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join("acceptance.json")
}

fn find<'a>(summary: &'a RunSummary, task: &str) -> Option<&'a TaskReport> {
    summary.reports.iter().find(|r| r.name == task)
}

fn judge(c: &Criterion, summary: &RunSummary) -> (bool, String) {
    let Some(report) = find(summary, c.task) else {
        return (false, format!("task '{}' missing from the scene", c.task));
    };
    let failed: Vec<String> = report.checks.iter().filter(|k| !k.pass()).map(|k| format!("{}={} ({})", k.name, k.value, k.bound)).collect();
    let elapsed = report.elapsed;
    let in_time = c.time_limit.is_none_or(|limit| elapsed <= limit);
    let mut detail = format!("{} checks, {:.2} s", report.checks.len(), elapsed.as_secs_f64());
    if let Some(limit) = c.time_limit {
        detail.push_str(&format!(" (limit {} s)", limit.as_secs()));
    }
    if !failed.is_empty() {
        detail.push_str(&format!("; failing: {}", failed.join(", ")));
    }
    (failed.is_empty() && !report.checks.is_empty() && in_time, detail)
}

#[test]
fn acceptance_criteria() {
    let first_dir = tempfile::tempdir().unwrap();
    let second_dir = tempfile::tempdir().unwrap();
    let first = run(&RunOptions { scene: scene(), out: Some(first_dir.path().into()), ..Default::default() }).unwrap();
    let _second = run(&RunOptions { scene: scene(), out: Some(second_dir.path().into()), threads: Some(2), ..Default::default() }).unwrap();

    let mut all = true;
    for c in &CRITERIA {
        let (pass, detail) = judge(c, &first);
        all &= pass;
        println!("criterion {:>2} {}: {} [{}]", c.number, if pass { "PASS" } else { "FAIL" }, c.title, detail);
    }
    let read = |dir: &Path| std::fs::read(dir.join("report.csv")).unwrap();
    let (a, b) = (read(first_dir.path()), read(second_dir.path()));
    let identical = a == b && a.len() > "task,check,value,tolerance,pass\n".len();
    all &= identical;
    println!(
        "criterion 10 {}: byte-identical CSV across two runs [{} bytes, second run on 2 threads]",
        if identical { "PASS" } else { "FAIL" },
        a.len()
    );
    assert!(all, "some acceptance criteria failed");
}
