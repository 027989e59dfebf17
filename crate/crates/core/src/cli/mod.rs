//! Command-line front end: `run`, `verify` and `sweep`.

mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_run, cmd_sweep, cmd_verify, execute_run, plan_sweep, verify_with, ExitStatus, RunOutcome,
    SweepPoint,
};

#[derive(Debug, Parser)]
#[command(name = "nonlocal-flow", version, about = "Simulate the non-local flow and check its energy inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation described by a TOML config.
    Run { config: PathBuf },
    /// Run the static verification suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run every point of the config's [sweep] grid.
    Sweep {
        config: PathBuf,
        /// Concurrent runs (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Parses `args` and dispatches; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return ExitStatus::ConfigError.code();
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let status = match cli.command {
        Command::Run { config } => cmd_run(&config, out, err),
        Command::Verify { seed } => cmd_verify(seed, out, err),
        Command::Sweep { config, jobs } => cmd_sweep(&config, jobs, out, err),
    };
    status.code()
}
