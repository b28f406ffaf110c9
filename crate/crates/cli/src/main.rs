//! `eqdet`: batch verification of the elliptic R-matrix identities and the
//! quantum determinant, with matrix dumps and parameter scans.
//!
//! Exit status: 0 success, 1 a check failed, 2 configuration error,
//! 3 numerical error (pole or convergence).

mod commands;
mod literal;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Common, LimitsArgs, MatrixArgs, ScanArgs, VerifyArgs};

#[derive(Parser, Debug)]
#[command(
    name = "eqdet",
    version,
    about = "Elliptic R-matrix identities and quantum determinant checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every check applicable to N and write one report per check.
    Verify(VerifyArgs),
    /// Dump one R-matrix.
    Matrix(MatrixArgs),
    /// Evaluate the quantum determinant at several spectral points.
    Qdet(Common),
    /// Follow the elliptic matrix towards its trigonometric limit along a p sequence.
    Limits(LimitsArgs),
    /// Re-run one check over a grid of |q| and |p|.
    Scan(ScanArgs),
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Verify(args) => commands::verify(args),
        Command::Matrix(args) => commands::matrix(args),
        Command::Qdet(common) => commands::qdet(common),
        Command::Limits(args) => commands::limits(args),
        Command::Scan(args) => commands::scan(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("eqdet: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
