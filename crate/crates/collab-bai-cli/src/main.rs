//! `collab-bai`: drive the collaborative best-arm identification simulator
//! from the shell.
//!
//! The binary is a thin shell over the library: commands resolve their
//! parameters (flags over `--config` file over defaults), build a
//! declarative spec, execute it, and leave behind CSV artifacts plus a
//! `metadata.json` that `replay` can turn back into the identical bytes.
//!
//! Exit codes follow the usual convention: 0 on success, 2 for invocation
//! mistakes (clap's own code for flag errors), 1 for runtime failures.
//! `BANDIT_COLLAB_THREADS` caps the worker pool; results never depend on
//! the worker count, only elapsed time does.

mod args;
mod commands;
mod error;
mod exec;
mod plot;
mod runspec;
mod settings;

use std::env;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{usage, UsageError};

fn main() -> ExitCode {
    // The runtime masks SIGPIPE, which turns `collab-bai ... | head` into a
    // print panic once head exits.  Restore the default disposition so a
    // closed pipe ends the process quietly, the way other shell tools do.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match configure_workers().and_then(|()| dispatch(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    if cli.show_config {
        settings::print_defaults();
        return Ok(());
    }
    match cli.command {
        Some(Command::Gen(args)) => commands::gen(args),
        Some(Command::Run(args)) => commands::run(args),
        Some(Command::Sweep(args)) => commands::sweep(args),
        Some(Command::Signid(args)) => commands::signid(args),
        Some(Command::Oracle(args)) => commands::oracle(args),
        Some(Command::Plot(args)) => commands::plot(args),
        Some(Command::Replay(args)) => commands::replay(args),
        None => Err(usage("a subcommand is required (see --help)")),
    }
}

/// Apply `BANDIT_COLLAB_THREADS` before any parallel work starts.  Unset
/// means rayon's default (one worker per CPU).
fn configure_workers() -> Result<()> {
    let raw = match env::var("BANDIT_COLLAB_THREADS") {
        Ok(raw) => raw,
        Err(env::VarError::NotPresent) => return Ok(()),
        Err(env::VarError::NotUnicode(_)) => {
            return Err(usage("BANDIT_COLLAB_THREADS must be a positive integer"));
        }
    };
    let workers: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        usage(format!(
            "BANDIT_COLLAB_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| anyhow!("cannot size the worker pool: {e}"))
}
