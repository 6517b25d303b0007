//! Command-line front end: configuration, initial data, output files and
//! the `gpcq` subcommands.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical
//! guard tripped.

pub mod commands;
pub mod config;
pub mod error;
pub mod initial;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Options;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "gpcq", version, about = "Pseudospectral GP / cubic-quintic NLS runs and checks")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; affects speed only.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for relative output paths.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the configured data and write diagnostics.
    Simulate,
    /// Run a sampling suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Paired run against the energy-critical law.
    Compare,
    /// Split a run into chunks of equal Strichartz size.
    Partition {
        /// Binary snapshot file to partition instead of running.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Overrides `partition.eta`.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Reduce the general cubic-quintic coefficients.
    #[command(allow_negative_numbers = true)]
    Rescale { alpha1: f64, alpha3: f64, alpha5: f64 },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Err(CliError::Config("this command needs --config PATH".into())),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let opts = Options {
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
    };
    match &cli.command {
        Command::Simulate => {
            let out = commands::simulate(load_config(cli)?, &opts)?;
            if let Some(g) = &out.summary.guard {
                eprintln!("gpcq: {}", g.message);
            }
            println!("{}", out.json_path.display());
            Ok(out.exit_code)
        }
        Command::Verify { suite, samples } => {
            let report_path = match &cli.config {
                Some(p) => RunConfig::load(p)?.outputs.report_path,
                None => None,
            };
            let report = commands::verify(*suite, *samples, cli.seed.unwrap_or(0), report_path.as_deref(), &opts)?;
            print_json(&report)?;
            Ok(if report.violations == 0 { 0 } else { 1 })
        }
        Command::Compare => {
            print_json(&commands::compare(load_config(cli)?, &opts)?)?;
            Ok(0)
        }
        Command::Partition { trajectory, eta } => {
            let out = commands::partition(load_config(cli)?, trajectory.as_deref(), *eta, &opts)?;
            print_json(&out)?;
            Ok(0)
        }
        Command::Rescale { alpha1, alpha3, alpha5 } => {
            print_json(&commands::rescale(*alpha1, *alpha3, *alpha5)?)?;
            Ok(0)
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let go = || match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gpcq: {e}");
            e.exit_code()
        }
    };
    match cli.threads {
        None => go(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) if n > 0 => pool.install(go),
            Ok(_) => {
                eprintln!("gpcq: --threads must be at least 1");
                1
            }
            Err(e) => {
                eprintln!("gpcq: cannot start thread pool: {e}");
                1
            }
        },
    }
}
