use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bearing_search_cli::plot::PlotKind;
use bearing_search_cli::{cmd_plot, cmd_simulate, cmd_sweep};

/// Bearing-only target search: run scenarios, sweep the trade-off weight,
/// render plots.
#[derive(Parser)]
#[command(name = "bearing-search", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop scenario; write the trace CSV and, next to it,
    /// a <out stem>.summary.json roll-up.
    Simulate {
        /// Scenario config (TOML; a .json extension switches to JSON).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Trace CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a grid of trade-off weights, seeds 0..runs each, and write the
    /// aggregate table.
    Sweep {
        /// Scenario config; its beta is replaced by the grid values.
        #[arg(long)]
        config: PathBuf,
        /// Weight grid as start:stop:step, both ends inclusive.
        #[arg(long)]
        beta: String,
        /// Runs per weight, using seeds 0..runs.
        #[arg(long)]
        runs: u64,
        /// Table CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a trace or sweep CSV to a static SVG.
    Plot {
        /// Input CSV: a simulate trace, or a sweep table for --kind sweep.
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, seed, out } => cmd_simulate(&config, seed, &out),
        Command::Sweep {
            config,
            beta,
            runs,
            out,
        } => cmd_sweep(&config, &beta, runs, &out),
        Command::Plot { input, kind, out } => cmd_plot(&input, kind, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
