// SPDX-License-Identifier: Apache-2.0

//! `ecs`: data for entangled coherent state phase-space and entanglement studies.
//!
//! Exit status is 0 on success, 1 when `verify` finds a violated tolerance and
//! 2 for invalid arguments or parameters.

mod args;
mod commands;
mod error;
mod oracle;
mod output;
mod state;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::CliResult;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Wigner(a) => commands::wigner::run(a).map(|_| true),
        Command::Peaks(a) => commands::peaks::run(a).map(|_| true),
        Command::Concurrence(a) => commands::concurrence::run(a).map(|_| true),
        Command::NoiseSweep(a) => commands::noise_sweep::run(a).map(|_| true),
        Command::Protocol(a) => commands::protocol::run(a).map(|_| true),
        Command::Verify(a) => commands::verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
