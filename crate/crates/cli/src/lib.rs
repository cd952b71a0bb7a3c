//! Command-line front end: kernel and Green function tabulation, wavepacket
//! propagation, perturbation reports and the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical non-convergence.

pub mod args;
pub mod commands;
pub mod config;
pub mod table;

use args::{Cli, Command};
use clap::Parser;
use std::ffi::OsString;
use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Returned when a verification suite ran to completion but a check failed.
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return EXIT_VERIFY;
    }
    let numerical = err.chain().any(|e| e.downcast_ref::<rashba::Error>().is_some_and(|e| e.is_numerical()));
    if numerical {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = config::RunConfig::resolve(&cli.common)?;
    match &cli.command {
        Command::Kernel(a) => commands::kernel::run(&config, a),
        Command::Green(a) => commands::green::run(&config, a),
        Command::Evolve(a) => commands::evolve::run(&config, a),
        Command::Report(a) => commands::report::run(&config, a),
        Command::Verify(a) => commands::verify::run(&config, a),
    }
}

pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
