//! `difflife`: evolution runs, soups, searches, collision scans, mean-field
//! reports and gate evaluation. Exit code 0 on success, 1 when the work
//! itself fails, 2 on bad usage.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use difflife::RuleSpec;

#[derive(Parser)]
#[command(name = "difflife", version, about = "Semi-totalistic interval-rule automata, centred on B2/S7")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone)]
pub struct Common {
    /// Rule as `Bx/Sy` or `R(δ1δ2θ1θ2)`.
    #[arg(long, default_value = "B2/S7", value_parser = parse_rule)]
    pub rule: RuleSpec,
    /// Seed for every random choice; recorded in each report.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for the files a command writes.
    #[arg(long, default_value = "difflife-out")]
    pub out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a pattern file or a random soup on a torus, writing PBM snapshots.
    Evolve(commands::EvolveArgs),
    /// Census of random soups: what is left after a number of steps.
    Soup(commands::SoupArgs),
    /// Exhaustive search for small localizations.
    Search(commands::SearchArgs),
    /// Outcome map of two catalog patterns over offsets and phases.
    Scan(commands::ScanArgs),
    /// A single collision.
    Collide(commands::CollideArgs),
    /// Mean-field polynomial, fixed points, iteration and Monte Carlo density.
    Meanfield(commands::MeanfieldArgs),
    /// Evaluate a gate blueprint.
    Gate(commands::GateArgs),
    /// Fate of every three-cell placement in a 3×3 block.
    Census(commands::CensusArgs),
}

fn parse_rule(s: &str) -> Result<RuleSpec, String> {
    difflife::parse_rule(s).map_err(|e| e.to_string())
}

/// Bad usage that clap cannot see, such as a missing pattern source.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(a) => commands::evolve(a),
        Command::Soup(a) => commands::soup(a),
        Command::Search(a) => commands::search(a),
        Command::Scan(a) => commands::scan(a),
        Command::Collide(a) => commands::collide(a),
        Command::Meanfield(a) => commands::meanfield(a),
        Command::Gate(a) => commands::gate(a),
        Command::Census(a) => commands::census(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
