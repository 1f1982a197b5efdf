//! Command-line front end: config loading, the four subcommands and their
//! output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "admlab", version, about = "Admittance-control simulation and loop analysis")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config value, e.g. `--set controller.ba=800`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Noise seed (TOML integers cap it at 2^63 - 1).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Time-domain run: trace and contact metrics.
    Simulate,
    /// Magnitude curves for the controller variants.
    Bode,
    /// Stability frontier over a payload or environment sweep.
    Frontier,
    /// Contact metrics for a list of controller variants.
    Compare,
}

impl Cli {
    /// Config file plus overrides, with the flag shortcuts applied last.
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(self.config.as_deref(), &self.set)?;
        if let Some(dir) = &self.out {
            cfg.output.dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            cfg.simulation.seed = seed;
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        Ok(cfg)
    }
}

/// Runs the parsed command. Returns the files written, or the config text
/// for `--dump-config`.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let cfg = cli.effective_config()?;
    if cli.dump_config {
        return Ok(vec![cfg.to_toml()]);
    }
    let threads = commands::thread_cap(std::env::var("ADMLAB_THREADS").ok().as_deref())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let written = pool.install(|| match cli.command {
        Command::Simulate => commands::cmd_simulate(&cfg),
        Command::Bode => commands::cmd_bode(&cfg),
        Command::Frontier => commands::cmd_frontier(&cfg),
        Command::Compare => commands::cmd_compare(&cfg),
    })?;
    Ok(written.iter().map(|p| p.display().to_string()).collect())
}
