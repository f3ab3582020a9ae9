//! `rbmducc` — construct, optimize, and compare shallow disentangled-UCC
//! ansatzes from the command line.
//!
//! Four subcommands cover the workflows the library supports end to end:
//! `run` executes one ansatz family on one system, `compare` sweeps every
//! bundled geometry of a molecule across families, `noisy` drives seeded
//! SPSA replicas under a noise model, and `oracle` regenerates the golden
//! reference energies. All results land on disk as versioned JSON/CSV;
//! nothing is plotted here.
//!
//! Exit codes: 0 success, 1 internal failure, 2 configuration or usage
//! error, 3 missing resource (asset, file, or empty sweep).

mod commands;
mod config;
mod output;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::OptimizerChoice;
use runs::Family;

/// Failures surfaced to the user, bucketed by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid settings or flag combinations (exit 2).
    Config(String),
    /// Missing files, assets, or empty selections (exit 3).
    Resource(String),
    /// Everything else (exit 1).
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Resource(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<rbmducc::Error> for CliError {
    fn from(e: rbmducc::Error) -> Self {
        match e {
            rbmducc::Error::Mode(m) => CliError::Config(m),
            rbmducc::Error::Resource(m) => CliError::Resource(m),
            rbmducc::Error::Io(e) => CliError::Resource(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

const KEY_HELP: &str = "\
Configuration keys (for --config files and --set overrides):
  system, fcidump, family, families, optimizer, outdir, replicas
  mp2_threshold, prob_threshold, measure_threshold, target_rank,
  max_iterations, partial_opt, partial_opt_iterations, n_samples,
  gibbs_burn_in, cg_tol, cg_max_iter, spsa_max_iter, noisy_reference
  noise.mode (noiseless|shot-gaussian|trajectory), noise.p1, noise.p2,
  noise.p_readout, noise.shots, noise.trajectories, noise.seed
  seeds.rbm_train, seeds.generation, seeds.optimizer
  rbm.n_hidden, rbm.learning_rate, rbm.epochs, rbm.cd_k, rbm.batch_size

The asset directory is resolved from RBMDUCC_ASSET_ROOT when set.";

#[derive(Parser)]
#[command(
    name = "rbmducc",
    version,
    about = "Construct, optimize, and compare shallow disentangled-UCC ansatzes",
    after_help = KEY_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and optimize one ansatz family on one system.
    Run(RunArgs),
    /// Sweep every bundled geometry of a molecule across ansatz families.
    Compare(CompareArgs),
    /// Run seeded SPSA replicas under noise; write per-replica and averaged trajectories.
    Noisy(NoisyArgs),
    /// Recompute golden reference energies (HF, MP2, FCI) for bundled systems.
    Oracle(OracleArgs),
}

/// Where the integrals come from: a bundled asset or an external file.
#[derive(Args, Clone)]
struct SourceArgs {
    /// Bundled system id, e.g. `bh_2.25` (ids follow `<molecule>_<geometry>`).
    #[arg(long, value_name = "ID", conflicts_with = "fcidump")]
    system: Option<String>,
    /// FCIDUMP file used instead of a bundled system.
    #[arg(long, value_name = "PATH")]
    fcidump: Option<PathBuf>,
}

/// Settings shared by every pipeline-executing subcommand.
#[derive(Args, Clone)]
struct CommonArgs {
    /// Key-value settings file (`key = value` lines, `#` comments).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Single `key=value` override, repeatable; applied after the file.
    #[arg(long, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Optimizer for parameter searches (default: from the noise mode).
    #[arg(long, value_enum)]
    optimizer: Option<OptimizerChoice>,
    /// Directory results are written into.
    #[arg(long, value_name = "DIR")]
    outdir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Ansatz family to build.
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Molecule prefix selecting the geometry sweep, e.g. `bh`.
    #[arg(long)]
    molecule: String,
    /// Families to compare (default: duccsd,duccsdt,rbm-ts).
    #[arg(long, value_enum, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct NoisyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Families to sweep (default: duccsd,duccsdt,rbm-ts).
    #[arg(long, value_enum, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    /// Seeded replicas per family (default: 20).
    #[arg(long)]
    replicas: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Restrict to these systems (comma separated; default: every asset).
    #[arg(long, value_delimiter = ',')]
    systems: Option<Vec<String>>,
    /// Write the store here instead of `<asset root>/golden.json`.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => commands::cmd_run(args),
        Command::Compare(args) => commands::cmd_compare(args),
        Command::Noisy(args) => commands::cmd_noisy(args),
        Command::Oracle(args) => commands::cmd_oracle(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
