//! Scenario runner: reproduces each headline experiment (cat generation,
//! atom-light entanglement, entanglement swapping, envelope propagation,
//! pi-phase calibration, validity bounds) from a flat config file and writes
//! plot-ready CSV plus a run manifest.

mod scenarios;

use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Both probes transferred to matter: the four-component entangled cat.
    Cat,
    /// One probe transferred, one emitted: the atom-light entangled pair.
    AtomLight,
    /// Full two-channel protocol with Bell measurement on the light modes.
    Swap,
    /// Envelope integrator vs the analytic delay/amplitude/phase.
    Propagate,
    /// Cross-phase calibration to pi.
    Calibrate,
    /// Loss, Doppler, dephasing and adiabaticity bounds.
    Validity,
}

/// Simulation scenarios for slow-light cat-state generation and swapping.
#[derive(Debug, Parser)]
#[command(name = "eitcat", version, about)]
pub struct Cli {
    /// Which scenario to run.
    #[arg(long, value_enum)]
    pub scenario: Scenario,

    /// Path to the key/value config file.
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Seed override for sampled runs.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Fock cutoff override for oracle comparisons.
    #[arg(long)]
    pub cutoff: Option<usize>,

    /// Monte Carlo mode for `swap`: draw this many Bell outcomes.
    #[arg(long)]
    pub sample: Option<usize>,

    /// Convergence study for `propagate`: number of grid refinements.
    #[arg(long)]
    pub grid_refine: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match scenarios::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.category().exit_code() as u8)
        }
    }
}
