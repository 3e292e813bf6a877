//! Command-line front end for the `satotate` library.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod selfcheck;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use error::{CliError, CliResult, EXIT_OK};

/// Value of `--config` as given on the command line, if any.
fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn resolve_threads(requested: Option<usize>) -> CliResult<usize> {
    match requested {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let threads = resolve_threads(cli.threads)?;
    match &cli.command {
        Command::Density(a) => commands::density(a),
        Command::Cdf(a) => commands::cdf(a),
        Command::Table(a) => commands::table(a),
        Command::Sample(a) => commands::sample(a, threads),
        Command::Census(a) => commands::census(a, threads),
        Command::Strata(a) => commands::strata(a, threads),
        Command::Selfcheck => commands::selfcheck(threads),
    }
}

/// Runs the program on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&argv) {
        let spliced = config::load(&path)
            .and_then(|entries| config::splice(&argv, &entries, &Cli::command()));
        match spliced {
            Ok(a) => argv = a,
            Err(e) => {
                eprintln!("error: {e}");
                return e.exit_code();
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
