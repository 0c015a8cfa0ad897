//! File formats and commands behind the `normprobe` binary.
//!
//! - [`nprb`]: NPRB1 embedding files.
//! - [`datasets`]: long-format norms, ratings and supercategory CSVs.
//! - [`results`]: the per-fold results CSV.
//! - [`commands`]: `run`, `report` and `dataset` subcommands.

pub mod cli;
pub mod commands;
pub mod datasets;
pub mod error;
pub mod nprb;
pub mod output;
pub mod results;

pub use error::{CliError, Result};

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                error::exit::USAGE_OR_IO
            } else {
                0
            };
        }
    };
    match cli::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
