//! Command-line driver: `simulate`, `bounds`, `concentration`, `divergence`
//! and `prior-mass`, each reading a JSON config and writing CSV/JSON
//! artifacts under an output directory.
//!
//! Exit status: 0 on success, 1 on usage or config errors, 2 when a
//! verification (`concentration`, `prior-mass`) does not hold.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use error::{CliError, CliResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFICATION_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "alpha-bandits", version, about = "Tempered Thompson sampling simulations and bound calculators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run replicated bandit experiments; writes traces.csv, summary.csv, manifest.json.
    Simulate(CommonArgs),
    /// Evaluate the regret bounds; writes bounds.json.
    Bounds(CommonArgs),
    /// Monte Carlo check of posterior concentration; writes concentration.csv.
    Concentration(CommonArgs),
    /// Rényi / KL divergence between two reward models; writes divergence.json.
    Divergence(CommonArgs),
    /// Prior-mass condition on a divergence ball; writes prior_mass.json.
    PriorMass(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "ALPHA_BANDITS_THREADS")]
    pub threads: Option<usize>,
    /// Override a config value, e.g. `--set horizon=500 --set policies.0.alpha=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

pub fn execute(cli: Cli) -> CliResult<Outcome> {
    let (common, run): (&CommonArgs, fn(&config::LoadedConfig, &CommonArgs) -> CliResult<Outcome>) = match &cli.command {
        Command::Simulate(c) => (c, |l, c| commands::simulate(l, &c.output_dir, c.threads)),
        Command::Bounds(c) => (c, |l, c| commands::bounds(l, &c.output_dir)),
        Command::Concentration(c) => (c, |l, c| commands::concentration(l, &c.output_dir, c.threads)),
        Command::Divergence(c) => (c, |l, c| commands::divergence(l, &c.output_dir)),
        Command::PriorMass(c) => (c, |l, c| commands::prior_mass(l, &c.output_dir)),
    };
    let loaded = config::load(&common.config, &common.overrides)?;
    run(&loaded, common)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::VerificationFailed) => EXIT_VERIFICATION_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
