use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sa_derham_cli::{run, RunOptions};

/// Runs the tasks of a scene file and writes CSV and text reports.
#[derive(Parser, Debug)]
#[command(name = "sa-derham", version)]
struct Args {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Comma-separated task names or kinds to run.
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    /// Report directory.
    #[arg(long, default_value = "report")]
    out: PathBuf,
    /// Seed for randomized suites, overriding the scene's.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override NAME=VALUE; NAME is task.check, kind.check, task or kind.
    #[arg(long)]
    tol: Vec<String>,
    /// Worker threads for parallel quadrature and matrix assembly.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let options = RunOptions {
        scene: args.scene,
        tasks: args.tasks,
        out: Some(args.out.clone()),
        seed: args.seed,
        tol: args.tol,
        threads: args.threads,
    };
    match run(&options) {
        Ok(summary) => {
            print!("{}", sa_derham_cli::report::text(&summary.reports));
            println!("reports written to {}", args.out.display());
            if summary.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
