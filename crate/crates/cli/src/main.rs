//! `floq`: batch front end over `floq-core`. JSON in, canonical JSON
//! reports out; exit code 0 when every check passes, 1 when a check
//! fails, 2 on usage or parse errors.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use io::CliError;

#[derive(Parser)]
#[command(
    name = "floq",
    version,
    about = "Verification toolkit for reversible stabiliser measurement sequences",
    after_help = "Exit codes: 0 all checks pass, 1 a check fails, 2 usage or parse error.\n\
                  Reports are canonical JSON (sorted keys, %.12e floats): a command run\n\
                  twice with the same inputs and seed writes byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check two stabiliser groups for a reversible transition, plus
    /// locality and dense projector identities where applicable
    VerifyPair(VerifyPairArgs),
    /// Execute a measurement sequence: outcomes, per-step groups, and
    /// the logical action of a full period
    Run(RunArgs),
    /// Check every conjugate basis element against a diameter bound
    CheckLocality(CheckLocalityArgs),
    /// Generalised logical unitaries
    #[command(subcommand)]
    Genu(GenuCmd),
    /// Dense statevector cross-checks
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Bundled example sequences
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Args)]
struct VerifyPairArgs {
    /// Input JSON: {"group_a":..,"group_b":..} with optional "lattice"
    /// and "bound", or {"catalog":NAME,"transition":T}
    #[arg(long)]
    input: PathBuf,
    /// Residual tolerance for the dense projector identities
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Input JSON: {"catalog":NAME} or {"isgs":[..]} with optional
    /// "transitions", "lattice" and "bound"
    #[arg(long)]
    input: PathBuf,
    /// Seed for the measurement outcome stream (default 0)
    #[arg(long, conflicts_with = "forced_outcomes")]
    seed: Option<u64>,
    /// Forced outcome stream, one + or - per measurement
    #[arg(long)]
    forced_outcomes: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckLocalityArgs {
    /// Input JSON: a sequence whose file or catalog entry carries a
    /// lattice and bound
    #[arg(long)]
    input: PathBuf,
    /// Worker threads for the per-transition sweep
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenuArgs {
    /// Input JSON: {"pair_ref":..} plus "terms" (with optional
    /// "global_phase" and "logical") or an explicit "matrix"
    #[arg(long)]
    input: PathBuf,
    /// Residual tolerance for the four conditions
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenuCmd {
    /// Test the four defining conditions against the pair
    Check(GenuArgs),
    /// Check conditions, then recover the canonical angle table
    Decompose(GenuArgs),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Projector identities and outcome uniformity on random codespace
    /// states
    Verify(OracleArgs),
}

#[derive(Args)]
struct OracleArgs {
    /// Input JSON: a pair source, optionally wrapped as {"pair_ref":..}
    /// with a "states" count (default 50)
    #[arg(long)]
    input: PathBuf,
    /// Seed for the random codespace states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Worker threads for the state sweep
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the bundled sequences
    List {
        /// Write the listing here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write one bundled sequence in the input JSON format
    Export {
        /// Entry name, as shown by `catalog list`
        name: String,
        /// Write the sequence here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Cmd::VerifyPair(a) => commands::verify_pair(&a.input, a.tol, a.output.as_deref()),
        Cmd::Run(a) => commands::run(
            &a.input,
            a.seed,
            a.forced_outcomes.as_deref(),
            a.output.as_deref(),
        ),
        Cmd::CheckLocality(a) => {
            commands::check_locality(&a.input, a.threads, a.output.as_deref())
        }
        Cmd::Genu(GenuCmd::Check(a)) => {
            commands::genu(false, &a.input, a.tol, a.output.as_deref())
        }
        Cmd::Genu(GenuCmd::Decompose(a)) => {
            commands::genu(true, &a.input, a.tol, a.output.as_deref())
        }
        Cmd::Oracle(OracleCmd::Verify(a)) => {
            commands::oracle_verify(&a.input, a.seed, a.tol, a.threads, a.output.as_deref())
        }
        Cmd::Catalog(CatalogCmd::List { output }) => commands::catalog_list(output.as_deref()),
        Cmd::Catalog(CatalogCmd::Export { name, output }) => {
            commands::catalog_export(&name, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Check(msg)) => {
            eprintln!("floq: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("floq: {msg}");
            ExitCode::from(2)
        }
    }
}
