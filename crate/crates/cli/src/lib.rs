//! Command implementations behind the `bearing-search` binary.
//!
//! Three commands: `simulate` runs one scenario and writes the trace CSV
//! plus a JSON summary, `sweep` grids the trade-off weight over seeds and
//! writes an aggregate table, `plot` renders either CSV shape to a static
//! SVG. Each returns `Result<(), CliError>`; the binary maps the error kind
//! to its exit code (2 for anything wrong with the inputs, 3 for a run that
//! failed mid-flight).

pub mod config;
pub mod plot;

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use bearing_search::simulator::{self, SimulationTrace};
use bearing_search::Error;

/// Header row of the sweep table.
pub const SWEEP_HEADER: &str = "beta,mean_search_time,mean_final_e_est,termination_rate";

/// Command-level failure, tagged with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Unusable input: bad arguments, unreadable or invalid config, wrong
    /// CSV shape. Exit code 2.
    Validation(String),
    /// The scenario was valid but the run itself broke down (controller or
    /// sensing fault). Partial outputs are already on disk. Exit code 3.
    Fault(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Fault(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Fault(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ControllerFault(_) => CliError::Fault(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

/// The run roll-up written next to the trace.
#[derive(Debug, Serialize)]
struct SummaryFile {
    terminated: bool,
    search_time: f64,
    /// `null` when the run never produced an estimate.
    final_e_est: f64,
}

/// Where [`cmd_simulate`] puts the JSON summary for a given trace path.
pub fn summary_path(out_path: &Path) -> std::path::PathBuf {
    out_path.with_extension("summary.json")
}

fn write_trace_outputs(trace: &SimulationTrace, out_path: &Path) -> Result<(), CliError> {
    write_file(out_path, simulator::to_csv_string(trace).as_bytes())?;
    let summary = SummaryFile {
        terminated: trace.summary.terminated,
        search_time: trace.summary.search_time,
        final_e_est: trace.summary.final_e_est,
    };
    let mut json =
        serde_json::to_string_pretty(&summary).expect("summary is always JSON-serializable");
    json.push('\n');
    write_file(&summary_path(out_path), json.as_bytes())
}

/// Run one scenario from a config file. Writes the trace CSV to `out_path`
/// and the summary JSON next to it; a mid-run fault still writes both
/// (truncated at the fault) before reporting.
pub fn cmd_simulate(
    config_path: &Path,
    seed_override: Option<u64>,
    out_path: &Path,
) -> Result<(), CliError> {
    let mut cfg = config::load(config_path)?;
    if let Some(seed) = seed_override {
        cfg.noise.seed = seed;
    }
    let scenario = cfg.to_scenario()?;
    let trace = simulator::run(&scenario)?;
    write_trace_outputs(&trace, out_path)?;
    if let Some(fault) = &trace.fault {
        return Err(CliError::Fault(format!("run aborted: {fault}")));
    }
    Ok(())
}

/// Expand a `start:stop:step` weight grid, inclusive of both ends (up to a
/// one-part-in-1e9 rounding cushion on the last point).
pub fn parse_beta_spec(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Validation(format!("weight spec \"{spec}\": {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad("expected start:stop:step"));
    };
    let num = |s: &str, what: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("{what} is not a number: {s:?}")))
    };
    let start = num(start, "start")?;
    let stop = num(stop, "stop")?;
    let step = num(step, "step")?;
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    if start < 0.0 {
        return Err(bad("weights are nonnegative"));
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if (stop - start) / step > 1e6 {
        return Err(bad("grid has over a million points"));
    }
    let mut betas = Vec::new();
    let cushion = 1e-9 * step.max(1.0);
    for i in 0.. {
        let v = start + i as f64 * step;
        if v > stop + cushion {
            break;
        }
        betas.push(v);
    }
    if betas.is_empty() {
        return Err(bad("range is empty"));
    }
    Ok(betas)
}

/// Grid the weight over `start:stop:step`, run seeds `0..runs` per weight,
/// and write the aggregate table.
pub fn cmd_sweep(
    config_path: &Path,
    beta_spec: &str,
    runs: u64,
    out_path: &Path,
) -> Result<(), CliError> {
    if runs < 1 {
        return Err(CliError::Validation("runs must be at least 1".into()));
    }
    let cfg = config::load(config_path)?;
    let scenario = cfg.to_scenario()?;
    let betas = parse_beta_spec(beta_spec)?;
    let seeds: Vec<u64> = (0..runs).collect();
    let rows = simulator::sweep_beta(&scenario, &betas, &seeds)?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.beta, row.mean_search_time, row.mean_final_e_est, row.termination_rate
        );
    }
    write_file(out_path, out.as_bytes())?;
    let faults: usize = rows.iter().map(|r| r.faults).sum();
    if faults > 0 {
        return Err(CliError::Fault(format!(
            "{faults} of {} runs aborted mid-flight; their censored times are in the table",
            betas.len() * seeds.len()
        )));
    }
    Ok(())
}

/// Render a trace or sweep CSV to SVG.
pub fn cmd_plot(input: &Path, kind: plot::PlotKind, out_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", input.display())))?;
    let svg = plot::render(kind, &text)?;
    write_file(out_path, svg.as_bytes())
}
