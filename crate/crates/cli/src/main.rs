//! `flagq`: run an experiment from a JSON config and write CSV (or JSON).
//!
//! Exit codes: 0 when every assertion passes, 1 on an assertion failure,
//! 2 on a configuration or construction error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use flagq_core::experiments::{run, Experiment, ExperimentConfig, ResultTable};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Verify,
    Szego,
    BerezinLimit,
    KernelDecay,
    Commute,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Verify => Experiment::Verify,
            Command::Szego => Experiment::Szego,
            Command::BerezinLimit => Experiment::BerezinLimit,
            Command::KernelDecay => Experiment::KernelDecay,
            Command::Commute => Experiment::Commute,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "flagq",
    version,
    about = "Toeplitz quantization experiments on flag manifolds"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON mirror instead of CSV.
    #[arg(long)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent (or the config's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(cli: &Cli) -> Result<ResultTable, String> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| e.to_string())?;
    pool.install(|| run(cli.command.into(), &cfg))
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == Some(0) {
        eprintln!("flagq: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let table = match execute(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("flagq: {e}");
            return ExitCode::from(2);
        }
    };
    let body = if cli.json {
        table.to_json()
    } else {
        match table.to_csv() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("flagq: {e}");
                return ExitCode::from(2);
            }
        }
    };
    let out = cli.out.clone().or_else(|| {
        table
            .provenance
            .config
            .get("output")
            .and_then(|v| v.as_str())
            .map(PathBuf::from)
    });
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &body) {
                eprintln!("flagq: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    for a in table.assertions.iter().filter(|a| !a.pass) {
        eprintln!("flagq: assertion {} failed: {}", a.name, a.detail);
    }
    if table.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
