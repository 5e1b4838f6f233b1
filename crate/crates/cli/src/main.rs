mod args;
mod commands;
mod family;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};

/// Marker for a verification suite that ran and failed.
#[derive(Debug)]
pub struct VerificationFailed;

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("HAMMING_SHIFT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        anyhow::anyhow!("HAMMING_SHIFT_THREADS must be a positive integer, got {value:?}")
    })?;
    if threads == 0 {
        anyhow::bail!("HAMMING_SHIFT_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<VerificationFailed>() {
        return EXIT_VERIFY;
    }
    match err.downcast_ref::<hamming_shift_core::Error>() {
        Some(hamming_shift_core::Error::TooWide { .. }) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Verify(a) => commands::verify(a),
        Command::Scan(a) => commands::scan(a),
        Command::Sample(a) => commands::sample(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
