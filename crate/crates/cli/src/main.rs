use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use mec_alloc::experiment::{run_sweep, write_outputs, ExperimentConfig};

/// Power control and MEC compute allocation: BS-density sweeps.
#[derive(Debug, Parser)]
#[command(name = "mec-alloc", version)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the (K, alpha) sweep and write CSV and plot data.
    Sweep(SweepArgs),
    /// Print the default configuration as JSON.
    DefaultConfig,
}

#[derive(Debug, clap::Args)]
struct SweepArgs {
    /// JSON configuration file; defaults are used for missing keys.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated BS counts, e.g. 4,9,16,25.
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,

    /// Comma-separated path-loss exponents, e.g. 3,4,5.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
}

fn sweep(args: SweepArgs) -> anyhow::Result<()> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = args.output {
        config.output_dir = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(ks) = args.k_values {
        config.bs_counts = ks;
    }
    if let Some(alphas) = args.alphas {
        config.alphas = alphas;
    }
    config.validate()?;

    log::info!(
        "sweeping K = {:?}, alpha = {:?}, seed = {}",
        config.bs_counts,
        config.alphas,
        config.seed
    );
    let records = run_sweep(&config).context("sweep failed")?;
    let files = write_outputs(&records, &config.output_dir)?;
    println!(
        "wrote {} records to {} ({} plot series)",
        records.len(),
        files.sweep_csv.display(),
        files.plot_files.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::DefaultConfig => {
            println!("{}", ExperimentConfig::default().to_json());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
