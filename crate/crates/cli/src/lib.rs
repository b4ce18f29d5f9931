//! Command-line front end for the Virasoro toolkit.

pub mod cache;
pub mod commands;
pub mod config;
pub mod exit;
pub mod output;
pub mod suite;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{GlobalArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "virasoro", version, about = "Truncated Virasoro representations, smeared fields and operator bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a truncated representation and check the algebra relations
    Rep,
    /// Inspect a field: coefficients, 3/2-norm, decay, corners
    Field {
        /// `piecewise-mobius`, `mode:<n>` or a CSV file of `n,re,im` rows
        #[arg(default_value = "piecewise-mobius")]
        spec: String,
    },
    /// Smear a field and check the operator identities
    Smear {
        #[arg(long, default_value = "piecewise-mobius")]
        field: String,
        /// Random field pairs for the commutator check
        #[arg(long, default_value_t = 20)]
        pairs: usize,
    },
    /// Estimate the energy-bound constants and check q <= 3 r^2
    Bounds {
        /// Also run the Fejér mollifier sweep on the piecewise field
        #[arg(long)]
        mollifier: bool,
        /// Largest k and m in the heat-factor cross-check table
        #[arg(long = "fm-max", default_value_t = 20)]
        fm_max: u32,
    },
    /// Run the acceptance suite and print a pass/fail line per criterion
    CheckAll {
        /// Comma-separated criterion numbers to run
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

/// Runs a parsed command; `Ok(false)` means a check failed.
pub fn execute(cli: Cli) -> Result<bool> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Rep => commands::cmd_rep(&cfg),
        Command::Field { spec } => commands::cmd_field(&cfg, &spec),
        Command::Smear { field, pairs } => commands::cmd_smear(&cfg, &field, pairs),
        Command::Bounds { mollifier, fm_max } => commands::cmd_bounds(&cfg, mollifier, fm_max),
        Command::CheckAll { only } => commands::cmd_check_all(&cfg, only),
    }
}

/// Parses `args` (program name first) and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(true) => exit::SUCCESS,
        Ok(false) => exit::CHECK_FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::code_for(&e)
        }
    }
}
