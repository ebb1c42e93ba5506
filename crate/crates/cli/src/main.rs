//! Experiment runner for annealing redescending M-estimators.

mod commands;
mod grid;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{kernel_dump, location, profile, tail, vertex};

#[derive(Debug, Parser)]
#[command(
    name = "redescend",
    version,
    about = "Annealing redescending M-estimator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Influence-function profile over cutoffs and temperatures.
    Profile(profile::Args),
    /// Weight, ψ and ρ of one kernel on a residual grid.
    KernelDump(kernel_dump::Args),
    /// Annealed location estimate on a seeded mixture sample.
    LocationDemo(location::Args),
    /// Synthetic vertex fits and the track classification table.
    VertexSim(vertex::Args),
    /// Hill oracle versus forward search, or a tail fit of one sample.
    TailIndex(tail::Args),
}

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    use redescend_core::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_) | Error::Dimension(_) | Error::OrderOutOfRange { .. }) => {
            EXIT_USAGE
        }
        Some(_) => EXIT_NUMERICAL,
        None if err.downcast_ref::<grid::GridError>().is_some() => EXIT_USAGE,
        None => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Profile(a) => profile::run(a),
        Command::KernelDump(a) => kernel_dump::run(a),
        Command::LocationDemo(a) => location::run(a),
        Command::VertexSim(a) => vertex::run(a),
        Command::TailIndex(a) => tail::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
