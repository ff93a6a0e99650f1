//! Scenario configuration, the closed-loop engine and the telemetry log.
//!
//! A run first simulates the scenario without faults to obtain the nominal
//! prediction (per-agent costs, visible sets and aim POIs at every FDI
//! tick), then simulates it again with faults while the monitor checks
//! each agent's reported cost against that prediction.

pub mod comm;
pub mod config;
pub mod telemetry;
pub mod world;

use std::fmt;

pub use comm::CommGraph;
pub use config::{AgentConfig, EnvironmentConfig, FdiConfig, PoiLayout, ScenarioConfig};
pub use telemetry::{AgentCostRecord, FdiRecord, GlobalRecord, StateRecord, TelemetryLog};
pub use world::{PointingLaw, World};

use crate::fdi::NominalPrediction;
use crate::{Error, Result};

/// Fault-free replica of `config` over its full horizon.
pub fn predict_nominal(config: &ScenarioConfig) -> Result<NominalPrediction> {
    predict_nominal_with_log(config).map(|(p, _)| p)
}

/// Prediction together with the replica's own telemetry.
pub fn predict_nominal_with_log(
    config: &ScenarioConfig,
) -> Result<(NominalPrediction, TelemetryLog)> {
    let mut world = World::nominal(config)?;
    world.run_to_end()?;
    Ok(world.into_prediction().expect("nominal world records"))
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub prediction: NominalPrediction,
    pub log: TelemetryLog,
}

/// A run that stopped early, with whatever was logged before the error.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<TelemetryLog>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            partial: Box::default(),
        }
    }
}

/// Predicts the nominal behaviour, then simulates the scenario with its
/// faults under the monitor.
pub fn run_scenario(config: &ScenarioConfig) -> std::result::Result<RunOutput, RunFailure> {
    let prediction = predict_nominal(config)?;
    let mut world = World::live(config, &prediction)?;
    if let Err(error) = world.run_to_end() {
        return Err(RunFailure {
            error,
            partial: Box::new(world.into_log()),
        });
    }
    let log = world.into_log();
    Ok(RunOutput { prediction, log })
}
