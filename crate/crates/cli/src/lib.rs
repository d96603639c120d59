//! Command-line surface of the toolkit: batch subcommands over corpora,
//! rankings, models, and sweep reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or runtime error.

mod commands;
mod options;

use clap::error::ErrorKind;
use clap::Parser;

pub use options::{Cli, Command};

/// Errors split by exit code.
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv` and runs the selected subcommand. Returns the process
/// exit code; diagnostics go to stderr, data to files under `--out`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let threads = cli.common().threads.unwrap_or(0);
    let outcome = if threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli)),
            Err(e) => Err(CliError::Runtime(e.into())),
        }
    } else {
        commands::dispatch(&cli)
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            1
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
