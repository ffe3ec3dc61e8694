//! `dicomo`: generate directed configuration models, measure them, and
//! compare against the limiting constants.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DiameterArgs, ExperimentArgs, ExploreArgs, GenerateArgs, GwArgs, TheoryArgs};

#[derive(Parser)]
#[command(name = "dicomo", version, about = "Directed configuration model laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limiting constants of a joint degree distribution.
    Theory(TheoryArgs),
    /// Draw a random digraph and write it as an edge list.
    Generate(GenerateArgs),
    /// Exact diameter of a generated or stored digraph.
    Diameter(DiameterArgs),
    /// Branching-process Monte Carlo.
    Gw(GwArgs),
    /// Neighbourhood profile of one half-edge, or a thin-depth scan.
    Explore(ExploreArgs),
    /// Seeded experiment with CSV and JSON reports.
    Experiment(ExperimentArgs),
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Theory(a) => config::merge(a).and_then(commands::theory),
        Command::Generate(a) => config::merge(a).and_then(commands::generate),
        Command::Diameter(a) => config::merge(a).and_then(commands::diameter),
        Command::Gw(a) => config::merge(a).and_then(commands::gw),
        Command::Explore(a) => config::merge(a).and_then(commands::explore),
        Command::Experiment(a) => commands::experiment(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
