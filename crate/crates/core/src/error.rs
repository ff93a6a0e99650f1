use std::fmt;

use crate::faults::FaultKind;
use crate::{AgentId, PoiId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("propagation diverged: integrator produced a non-finite state")]
    PropagationDiverged,

    #[error("degenerate pointing: aim point coincides with the sensor position")]
    DegeneratePointing,

    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),

    #[error("fault kind mismatch: operator expects {expected}, spec is {actual}")]
    WrongFaultKind {
        expected: FaultKind,
        actual: FaultKind,
    },

    #[error("agent {agent} has no nominal target POI at t = {t} s")]
    EmptyCandidates { agent: AgentId, t: f64 },

    #[error("threshold unavailable for agent {agent} at t = {t} s")]
    ThresholdUnavailable { agent: AgentId, t: f64 },

    #[error("unknown POI {0}")]
    UnknownPoi(PoiId),

    #[error("nominal prediction does not cover t = {t} s")]
    PredictionMismatch { t: f64 },

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Validation(ValidationErrors),

    #[error("telemetry format error: {0}")]
    Telemetry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One failed invariant, addressed by its dotted field path
/// (e.g. `agents[2].camera.half_angle_fov`).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

/// Every violation found while validating a scenario, in discovery order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationErrors(pub Vec<FieldError>);

impl ValidationErrors {
    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains_path(&self, path: &str) -> bool {
        self.0.iter().any(|e| e.path == path)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scenario validation failed ({} errors)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  {}: {}", e.path, e.message)?;
        }
        Ok(())
    }
}
