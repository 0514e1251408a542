use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levicert_cli::config::Task;
use levicert_cli::{emit, run_with_workers, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "levicert", version, about = "Levi-form analysis and weighted q-pseudoconvexity certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the boundary and check the trace condition.
    Analyze(Common),
    /// Certify the weight hypotheses over a δ-ladder.
    Certify(Common),
    /// Fit the exponents of the scaled box integral.
    Scale(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for point-parallel work.
    #[arg(long)]
    workers: Option<usize>,
}

fn execute(task: Task, args: &Common) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.task = task;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.workers == Some(0) {
        return Err(CliError::Invalid(vec!["--workers: must be positive".into()]));
    }
    let report = run_with_workers(&cfg, args.workers)?;
    let written = emit(&report, &args.out, &cfg.outputs)?;
    for v in &report.verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    println!("report written to {}", written.report.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match &cli.command {
        Command::Analyze(a) => (Task::Analyze, a),
        Command::Certify(a) => (Task::Certify, a),
        Command::Scale(a) => (Task::Scale, a),
    };
    match execute(task, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
