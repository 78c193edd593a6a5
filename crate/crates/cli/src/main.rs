//! `holowdm <psf|eigs|dof|capacity|all> --config <path> --out <dir> [--seed N]`

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use holowdm::config::parse_config;
use holowdm::harness::{run_experiment, Experiment};
use holowdm::table::emit_csv;

/// Environment variable capping the worker pool size; 0 or unset means one
/// thread per core.
const THREADS_ENV: &str = "HOLOWDM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Psf,
    Eigs,
    Dof,
    Capacity,
    All,
}

impl Command {
    fn experiments(self) -> Vec<Experiment> {
        match self {
            Command::Psf => vec![Experiment::Psf],
            Command::Eigs => vec![Experiment::Eigs],
            Command::Dof => vec![Experiment::Dof],
            Command::Capacity => vec![Experiment::Capacity],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holowdm", version, about = "WDM holographic MIMO channel experiments")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the configuration
    #[arg(long)]
    seed: Option<u64>,
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => bail!("{THREADS_ENV}: {e}"),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count")),
    }
}

fn run(cli: Cli) -> Result<()> {
    let text = fs::read_to_string(&cli.config).with_context(|| format!("reading {}", cli.config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("invalid config {}", cli.config.display()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .context("building worker pool")?;
    log::debug!("using {} worker threads", pool.current_num_threads());

    for experiment in cli.command.experiments() {
        let table = pool
            .install(|| run_experiment(&cfg, experiment))
            .with_context(|| format!("experiment `{experiment}` failed"))?;
        let path = cli.out.join(experiment.file_name());
        emit_csv(&table, &path)?;
        log::info!("wrote {} ({} rows)", path.display(), table.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
