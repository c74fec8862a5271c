//! Building blocks of the `hmimo` command-line tool: argument definitions,
//! config-file merging, CSV and manifest output, plots and the subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

pub use args::{Cli, Command};

/// Parses the (config-expanded) argument list and runs the selected
/// subcommand.
pub fn run<I, T>(argv: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let expanded = config::expand(&argv)?;
    let cli = Cli::try_parse_from(expanded).unwrap_or_else(|e| e.exit());
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global()?;
    }
    commands::dispatch(&cli)
}
