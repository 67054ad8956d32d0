//! Scene-file runner: loads objects, executes tasks, writes reports.

pub mod error;
pub mod layout;
pub mod report;
pub mod scene;
pub mod tasks;

use std::path::PathBuf;

use error::{CliError, CliResult};
use scene::Scene;
use tasks::{run_task, Overrides, TaskReport};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub scene: PathBuf,
    /// Task names or kinds to run; all when empty.
    pub tasks: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Vec<String>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub reports: Vec<TaskReport>,
}

impl RunSummary {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(TaskReport::pass)
    }
}

/// Parses `NAME=VALUE` tolerance overrides.
pub fn parse_overrides(items: &[String]) -> CliResult<Overrides> {
    let mut map = std::collections::BTreeMap::new();
    for item in items {
        let (name, value) = item.split_once('=').ok_or_else(|| CliError::Tolerance(format!("'{item}' is not NAME=VALUE")))?;
        let value: f64 = value.trim().parse().map_err(|_| CliError::Tolerance(format!("'{value}' is not a number")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::Tolerance(format!("tolerance {value} must be finite and non-negative")));
        }
        map.insert(name.trim().to_string(), value);
    }
    Ok(tasks::Overrides(map))
}

pub fn run(options: &RunOptions) -> CliResult<RunSummary> {
    let overrides = parse_overrides(&options.tol)?;
    let scene = Scene::load(&options.scene)?;
    let seed = options.seed.unwrap_or(scene.seed);
    let execute = || -> Vec<TaskReport> {
        scene
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t, t.name.clone().unwrap_or_else(|| format!("{}-{i}", t.kind.name()))))
            .filter(|(_, t, name)| options.tasks.is_empty() || options.tasks.iter().any(|f| f == name || f == t.kind.name()))
            .map(|(i, t, _)| run_task(&scene, t, i, seed, &overrides))
            .collect()
    };
    let reports = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Threads(e.to_string()))?
            .install(execute),
        None => execute(),
    };
    if let Some(dir) = &options.out {
        report::write_all(dir, &reports)?;
    }
    Ok(RunSummary { reports })
}
