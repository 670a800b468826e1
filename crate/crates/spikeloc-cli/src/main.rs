//! spikeloc: train and evaluate spiking localization networks.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 numeric failure.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use spikeloc::error::Error;

#[derive(Parser)]
#[command(
    name = "spikeloc",
    version,
    about = "Spiking neural network toolkit for single-object localization"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate or inspect synthetic localization datasets.
    Dataset(commands::dataset::Args),
    /// Encode an image or event stream into a spike tensor file.
    Encode(commands::encode::Args),
    /// Train a network and write the best checkpoint plus a metrics log.
    Train(commands::train::Args),
    /// Evaluate a checkpoint: clean mIoU, single corruptions, or sweeps.
    Eval(commands::eval::Args),
    /// Estimate SNN vs ANN energy from measured spike rates.
    Energy(commands::energy::Args),
    /// Apply a corruption to an image or spike tensor file.
    Corrupt(commands::corrupt::Args),
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Shape(_) => 2,
        Error::Data(_) => 3,
        Error::Numeric(_) => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Dataset(args) => commands::dataset::run(args),
        Cmd::Encode(args) => commands::encode::run(args),
        Cmd::Train(args) => commands::train::run(args),
        Cmd::Eval(args) => commands::eval::run(args),
        Cmd::Energy(args) => commands::energy::run(args),
        Cmd::Corrupt(args) => commands::corrupt::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
