//! One module per subcommand.

mod acf;
mod calibrate;
mod gen;
mod nmse;
mod spectrum;

pub use nmse::{parse_estimators, parse_snr_grid};

use crate::args::{Cli, Command};

pub fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Acf(a) => acf::run(a),
        Command::Nmse(a) => nmse::run(a),
        Command::Spectrum(a) => spectrum::run(a),
        Command::Gen(a) => gen::run(a),
        Command::Calibrate(a) => calibrate::run(a),
    }
}
