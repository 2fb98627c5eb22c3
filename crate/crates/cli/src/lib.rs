//! Command-line front end: argument parsing, dispatch and file output.

pub mod analysis;
pub mod config;
pub mod output;
pub mod sim;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, Command, RunConfig};

pub const THREADS_ENV: &str = "PETITION_PULSE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] petition_pulse::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit codes: 0 success, 1 bad input or usage, 2 replication gate failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match with_pool(|| dispatch(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn with_pool<F>(f: F) -> CliResult<i32>
where
    F: FnOnce() -> CliResult<i32> + Send,
{
    let Ok(raw) = std::env::var(THREADS_ENV) else { return f() };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(f)
}

fn dispatch(command: &Command) -> CliResult<i32> {
    match command {
        Command::Ingest(a) => analysis::ingest(a, &RunConfig::for_data("ingest", a)).map(|_| 0),
        Command::Metrics(a) => analysis::metrics(a, &RunConfig::for_data("metrics", a)).map(|_| 0),
        Command::Compare(a) => analysis::compare(a, &RunConfig::for_data("compare", a)).map(|_| 0),
        Command::Regress(a) => analysis::regress(a, &RunConfig::for_data("regress", a)).map(|_| 0),
        Command::Curves(a) => analysis::curves(a, &RunConfig::for_data("curves", a)).map(|_| 0),
        Command::Geo(a) => analysis::geo(a, &RunConfig::for_data("geo", a)).map(|_| 0),
        Command::Simulate(a) => sim::simulate(a, &RunConfig::for_sim("simulate", a)).map(|_| 0),
        Command::Replicate(a) => {
            sim::replicate(a, &RunConfig::for_sim("replicate", a)).map(|passed| if passed { 0 } else { 2 })
        }
    }
}
