//! CSV and text reports. The CSV files hold only deterministic content.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::tasks::TaskReport;

pub const CSV_HEADER: &str = "task,check,value,tolerance,pass";

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rows(out: &mut String, report: &TaskReport) {
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            field(&report.name),
            field(&c.name),
            number(c.value),
            field(&c.bound.to_string()),
            c.pass()
        );
    }
}

/// Plain decimal for moderate magnitudes, scientific otherwise; both round-trip.
pub fn number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn csv(reports: &[TaskReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    reports.iter().for_each(|r| rows(&mut out, r));
    out
}

pub fn text(reports: &[TaskReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[{status}] {} ({}) {:.3} s", r.name, r.kind, r.elapsed.as_secs_f64());
        for c in &r.checks {
            let mark = if c.pass() { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "  {mark} {} = {} {}", c.name, number(c.value), c.bound);
        }
        for n in &r.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    let failed = reports.iter().filter(|r| !r.pass()).count();
    let _ = writeln!(out, "{} tasks, {failed} failed", reports.len());
    out
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// `report.csv`, `report.txt` and one `<task>.csv` per task under `dir`.
pub fn write_all(dir: &Path, reports: &[TaskReport]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
    write(&dir.join("report.csv"), &csv(reports))?;
    write(&dir.join("report.txt"), &text(reports))?;
    for r in reports {
        let file: String = r.name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
        write(&dir.join(format!("{file}.csv")), &csv(std::slice::from_ref(r)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sa_derham::checks::Check;
    use std::time::Duration;

    fn sample() -> TaskReport {
        TaskReport {
            name: "a,b".into(),
            kind: "integrate",
            checks: vec![Check::at_most("residual", 0.5, 1e-9), Check::recorded("steps", 3.0)],
            notes: vec!["rank 2".into()],
            elapsed: Duration::from_millis(5),
        }
    }

    #[test]
    fn csv_quotes_fields_and_omits_timings() {
        let s = csv(&[sample()]);
        assert_eq!(s, "task,check,value,tolerance,pass\n\"a,b\",residual,0.5,<=1e-9,false\n\"a,b\",steps,3,,true\n");
    }

    #[test]
    fn small_values_use_exponents() {
        assert_eq!(number(2.220446049250313e-16), "2.220446049250313e-16");
        assert_eq!(number(0.5), "0.5");
        assert_eq!(number(0.0), "0");
    }

    #[test]
    fn text_report_keeps_notes() {
        let s = text(&[sample()]);
        assert!(s.contains("[FAIL] a,b"));
        assert!(s.contains("note: rank 2"));
        assert!(s.ends_with("1 tasks, 1 failed\n"));
    }
}
