use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsforge::commands;

/// Batch feature extraction for physiological time series.
#[derive(Parser)]
#[command(name = "tsforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a pipeline config without running it.
    Validate { config: PathBuf },
    /// Run a pipeline config and write the feature table.
    Run {
        config: PathBuf,
        /// Worker threads; overrides `run.n_jobs`.
        #[arg(long)]
        n_jobs: Option<usize>,
        /// Output file; overrides `run.output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Summarise a record: a CSV file, a WFDB `.hea` file or a header URL.
    Inspect {
        target: String,
        /// Sampling rate for CSV input.
        #[arg(long)]
        fs: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr();
    let code = match cli.command {
        Command::Validate { config } => commands::cmd_validate(&config, &mut out, &mut err),
        Command::Run {
            config,
            n_jobs,
            output,
        } => commands::cmd_run(&config, n_jobs, output.as_deref(), &mut out, &mut err),
        Command::Inspect { target, fs } => commands::cmd_inspect(&target, fs, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
