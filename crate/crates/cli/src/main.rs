//! `swarm-fdi` command-line front end.
//!
//! Exit codes: 0 success, 1 the scenario could not be loaded or failed
//! validation, 2 the run itself failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use swarm_fdi::io::{self, canonical_hash, load_scenario};
use swarm_fdi::sim::{predict_nominal, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(
    name = "swarm-fdi",
    version,
    about = "Collaborative-inspection simulator with task-aware FDI"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a scenario, listing every problem found.
    Validate { scenario: PathBuf },
    /// Predict, simulate with faults and write telemetry plus plot data.
    Run {
        scenario: PathBuf,
        #[arg(long, env = "SWARM_FDI_OUT")]
        out: PathBuf,
        /// Override the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the fault-free nominal prediction only.
    Predict {
        scenario: PathBuf,
        #[arg(long, env = "SWARM_FDI_OUT")]
        out: PathBuf,
    },
    /// Regenerate plot data files from a telemetry directory.
    Plots { telemetry_dir: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig, ExitCode> {
    load_scenario(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn runtime_failure(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn execute(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Validate { scenario } => {
            let cfg = load(&scenario)?;
            let expanded = cfg.expanded();
            println!(
                "ok: {} ({} agents, {} POIs, {} faults, {} steps) hash {}",
                cfg.name,
                expanded.agents.len(),
                expanded.pois.len(),
                expanded.faults.len(),
                expanded.step_count(),
                canonical_hash(&cfg)
            );
        }
        Command::Run {
            scenario,
            out,
            seed,
        } => {
            let mut cfg = load(&scenario)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let manifest = io::run(&cfg, &scenario, &out).map_err(runtime_failure)?;
            println!(
                "wrote {} files to {} in {:.2} s",
                manifest.files.len() + 1,
                out.display(),
                manifest.wall_clock_seconds
            );
        }
        Command::Predict { scenario, out } => {
            let cfg = load(&scenario)?;
            std::fs::create_dir_all(&out).map_err(runtime_failure)?;
            let prediction = predict_nominal(&cfg).map_err(runtime_failure)?;
            let files = io::write_prediction(&prediction, &out).map_err(runtime_failure)?;
            println!("wrote {} files to {}", files.len(), out.display());
        }
        Command::Plots { telemetry_dir } => {
            let files = io::emit_plots_from_dir(&telemetry_dir).map_err(runtime_failure)?;
            println!(
                "wrote {} plot files to {}",
                files.len(),
                telemetry_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
