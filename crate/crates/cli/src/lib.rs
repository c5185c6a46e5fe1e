//! Command-line front end for `sparsesense`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Context;
use crate::config::{ConfigFile, Settings};
use crate::error::{CliError, CliResult};

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => 0,
                _ => CliError::usage("").exit_code(),
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let settings = Settings::from_env(file);
    let seed = settings.seed(cli.global.seed)?;
    let threads: usize = settings.get_or(cli.global.threads, "threads", 0)?;
    let out_dir: PathBuf = settings.get_or(cli.global.out_dir, "out-dir", PathBuf::from("."))?;
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
    let cx = Context { settings, seed, out_dir };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Synth(a) => commands::synth(&cx, a),
        Command::Place(a) => commands::place(&cx, a),
        Command::Sweep(a) => commands::sweep(&cx, a),
        Command::Mf(a) => commands::mf(&cx, a),
        Command::Report(a) => commands::report(&cx, a),
    })
}
