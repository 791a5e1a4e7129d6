//! `anc`: run, compare and inspect active noise control experiments.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_compare, cmd_paths, cmd_run, Selection, Status};

#[derive(Parser)]
#[command(
    name = "anc",
    version,
    about = "FxLMS vs Kalman active noise control experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment; write `<name>.csv` and `<name>.summary.json`.
    Run(CommonArgs),
    /// Run the compare list; write compare.csv, compare.summary.json and compare.svg.
    Compare(CommonArgs),
    /// Write primary/secondary path coefficients as CSV and SVG.
    Paths(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "ANC_OUT", default_value = "anc-out")]
    out: PathBuf,
    /// Built-in experiment set: paper, paper-fxlms or paper-kalman.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Overrides the seed of every experiment.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

impl From<CommonArgs> for Selection {
    fn from(args: CommonArgs) -> Self {
        Selection {
            config: args.config,
            preset: args.preset,
            seed: args.seed,
            out: args.out,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args.into()),
        Command::Compare(args) => cmd_compare(&args.into()),
        Command::Paths(args) => cmd_paths(&args.into()),
    };
    match result {
        Ok(status) => {
            if let Status::Diverged(names) = &status {
                eprintln!("diverged: {}", names.join(", "));
            }
            status.exit_code()
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
