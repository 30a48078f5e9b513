//! Command-line front end of the rank-deficiency toolkit. The binary is a
//! thin wrapper around [`run`], which is also usable in-process.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::Cli;
use error::CliError;
use output::{Summary, Versions};
use ranklab::Execution;

fn try_run(argv: Vec<std::ffi::OsString>, echo_paths: bool) -> Result<(), CliError> {
    let argv = config::expand_argv(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            // Help and version requests print to stdout and succeed.
            let _ = e.print();
            return if code == 0 { Ok(()) } else { Err(CliError::Config(String::new())) };
        }
    };
    let cmd = &cli.command;
    let common = cmd.common();
    ranklab::par::configure_threads(common.threads);
    let exec = if common.threads == 1 { Execution::Sequential } else { Execution::Parallel };

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let out = commands::run(cmd, exec)?;
    let elapsed_s = clock.elapsed().as_secs_f64();

    let stem = cmd.name();
    let mut outputs = output::write_results(&common.out_dir, stem, common.format, &out)?;
    let summary_path = common.out_dir.join(format!("{stem}.summary.json"));
    outputs.push(summary_path);
    let summary = Summary {
        subcommand: stem.to_string(),
        config: cmd.config_json(),
        seed: common.seed,
        started,
        elapsed_s,
        outputs: outputs.clone(),
        versions: Versions { ranklab: env!("CARGO_PKG_VERSION"), ranklab_core: ranklab::VERSION },
    };
    output::write_summary(&common.out_dir, stem, &summary)?;
    if echo_paths {
        for p in &outputs {
            println!("{}", p.display());
        }
    }
    Ok(())
}

/// Run one invocation (`argv[0]` is the program name), print the written
/// paths, and return the exit code: 0 on success, 2 on configuration
/// errors, 1 on runtime errors.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    finish(try_run(argv.into_iter().map(Into::into).collect(), true))
}

/// Like [`run`], without echoing the written paths.
pub fn run_quiet<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    finish(try_run(argv.into_iter().map(Into::into).collect(), false))
}

fn finish(result: Result<(), CliError>) -> u8 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            e.exit_code()
        }
    }
}
