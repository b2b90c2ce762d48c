//! `ceres`: command-line front end over the schematic CERES pipeline.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Interchange,
}

#[derive(Parser, Debug)]
#[command(name = "ceres", version, about = "Cut-elimination by resolution for proof schemata")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest parameter value to evaluate; defaults to the file's
    /// `gamma_max` directive, then 8.
    #[arg(long, global = true, env = "CERES_GAMMA_MAX")]
    pub gamma_max: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check the schema, its instances up to the bound, and any named proofs.
    Check { file: PathBuf },
    /// Evaluate the schema at one parameter value.
    Eval {
        file: PathBuf,
        #[arg(long)]
        gamma: u64,
    },
    /// Characteristic clause set at one parameter value.
    Clset {
        file: PathBuf,
        #[arg(long)]
        gamma: u64,
        /// Delete tautologies and subsumed clauses.
        #[arg(long)]
        reduce: bool,
        /// Use the named proof instead of the schema.
        #[arg(long)]
        proof: Option<String>,
    },
    /// Projections at one parameter value.
    Proj {
        file: PathBuf,
        #[arg(long)]
        gamma: u64,
        #[arg(long)]
        proof: Option<String>,
    },
    /// Refutation of the characteristic clause set.
    Refute {
        file: PathBuf,
        #[arg(long)]
        gamma: u64,
        /// Search for a refutation instead of using the refutation schema.
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        proof: Option<String>,
    },
    /// Atomic-cut normal forms over a range such as `0..5` (inclusive).
    Acnf {
        file: PathBuf,
        #[arg(long)]
        gamma_range: Option<String>,
        #[arg(long)]
        auto: bool,
    },
    /// Translate between proof schemata and k-simple induction proofs.
    Translate {
        #[arg(value_enum)]
        direction: Direction,
        file: PathBuf,
        /// Proof to translate with `from-lki`; the first one by default.
        #[arg(long)]
        proof: Option<String>,
    },
    /// Pipeline statistics for every parameter value up to the bound.
    Report { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    ToLki,
    FromLki,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
