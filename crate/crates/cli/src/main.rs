//! `commutant`: command-line front end for commutant-core.
//!
//! Exit codes: 0 ok, 1 a check failed (verify residual, block structure,
//! region disagreement), 2 ambiguous rank, 3 unstable dimension, 4 I/O,
//! 5 validation (bad arguments, parse errors, dimension mismatches).

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{emit, EXIT_OK, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION as u8 } else { EXIT_OK as u8 });
        }
    };
    let (common, outcome) = match &cli.command {
        Command::Commutant(c) => (c, commands::commutant(c)),
        Command::Report(c) => (c, commands::report(c)),
        Command::Verify { common, matrix, trials } => (common, commands::verify(common, matrix, *trials)),
        Command::Twirl { common, matrix, n, schedule, csv } => {
            (common, commands::twirl(common, matrix, *n, schedule, csv.as_deref()))
        }
        Command::Region { common, direction, csv, grid, range } => {
            (common, commands::region(common, direction, csv.as_deref(), *grid, *range))
        }
    };
    let code = match outcome.and_then(|o| emit(&o, common.format, common.out.as_deref()).map(|_| o.exit)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
