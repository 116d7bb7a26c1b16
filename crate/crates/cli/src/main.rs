use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbackbone::harness::{load_config, run_sweep, Emit, RunOptions};

#[derive(Parser)]
#[command(name = "qbackbone", version, about = "Satellite quantum-backbone sweep runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every scenario of a config sweep and export result tables.
    Run {
        /// Scenario configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to the config's `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 lets the scheduler decide.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Only run scenarios whose id contains this substring.
        #[arg(long)]
        scenario_filter: Option<String>,
        /// Which tables to write: edges, traces, stats, or all.
        #[arg(long, default_value = "stats")]
        emit: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // 1: the inputs were bad; 2: the run itself failed.
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> qbackbone::Result<()> {
    match cli.command {
        Command::Run { config, out, workers, scenario_filter, emit } => {
            let emit: Emit = emit.parse()?;
            let config = load_config(&config)?;
            let out = out.or_else(|| config.output.dir.clone()).ok_or_else(|| {
                qbackbone::Error::config("output.dir", "set it in the config or pass --out")
            })?;
            let opts = RunOptions { workers, filter: scenario_filter, emit };
            let outcome = run_sweep(&config, &out, &opts)?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            println!("{} scenario(s) -> {}", outcome.scenario_ids.len(), out.display());
            Ok(())
        }
    }
}
