use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod format;
mod report;

/// Exact verification and cohomology of n-ary algebras given by structure
/// constants.
///
/// Wherever an INPUT is expected, either a JSON algebra file or a catalog
/// name is accepted: A<k>, A_<s>_<t>, so3, so12, abelian:<n>:<dim>,
/// sum:<a>:<b>[:...].
#[derive(Debug, Parser)]
#[command(name = "nary", version)]
pub struct Cli {
    /// Emit reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity checks on an algebra.
    Verify {
        input: String,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fi")]
        checks: Vec<Check>,
    },
    /// First cohomology for central extensions or deformations.
    H1 {
        input: String,
        #[arg(long, value_enum)]
        action: ActionArg,
        #[arg(long, value_enum, default_value = "full")]
        symmetry: SymmetryArg,
    },
    /// Derived series, semisimplicity, Lie(G) and metric checks.
    Structure { input: String },
    /// Jacobian n-bracket identities on polynomials.
    Nambu {
        /// Comma-separated variable names; their count is the arity.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        fs: Vec<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        gs: Vec<String>,
        #[arg(long, value_enum)]
        check: NambuCheck,
    },
    /// Write the canonical JSON form of an algebra.
    Export {
        input: String,
        /// Destination file (stdout if omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Fi,
    Gji,
    Symmetry,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActionArg {
    Trivial,
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymmetryArg {
    Full,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NambuCheck {
    Fi,
    Leibniz,
    Skew,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
