//! Fault-free replica of a scenario, sampled at FDI ticks.

use std::collections::BTreeSet;

use crate::geometry::Sigma;
use crate::{AgentId, PoiId, Vec3};

/// What one agent is expected to see and report at one FDI tick.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedAgentTick {
    pub agent: AgentId,
    pub position: Vec3,
    pub boresight: Vec3,
    /// POI the sensor is aimed at; `None` when nothing was observable.
    pub target_poi: Option<PoiId>,
    /// Finite σ entries, in POI id order.
    pub visible: Vec<(PoiId, Sigma)>,
    /// `H_i` reported by the fault-free replica (its own ψ).
    pub h_pred: f64,
}

impl PredictedAgentTick {
    pub fn visible_set(&self) -> BTreeSet<PoiId> {
        self.visible.iter().map(|&(id, _)| id).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedTick {
    pub t: f64,
    /// One entry per agent, in id order.
    pub agents: Vec<PredictedAgentTick>,
    /// Global cost of the fault-free replica.
    pub h_nom: f64,
}

impl PredictedTick {
    pub fn agent(&self, agent: AgentId) -> Option<&PredictedAgentTick> {
        self.agents
            .binary_search_by_key(&agent, |a| a.agent)
            .ok()
            .map(|k| &self.agents[k])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NominalPrediction {
    pub horizon_start: f64,
    pub horizon_end: f64,
    pub agent_ids: Vec<AgentId>,
    /// FDI ticks, starting at `t = 0`.
    pub ticks: Vec<PredictedTick>,
    /// Aim POI for every simulation step (outer) and agent (inner, id
    /// order). The live run reuses these aim points.
    pub pointing_plan: Vec<Vec<Option<PoiId>>>,
}

impl NominalPrediction {
    pub fn times(&self) -> Vec<f64> {
        self.ticks.iter().map(|k| k.t).collect()
    }

    pub fn h_nom_series(&self) -> Vec<f64> {
        self.ticks.iter().map(|k| k.h_nom).collect()
    }

    /// `(t, H_i^pred)` for one agent.
    pub fn agent_series(&self, agent: AgentId) -> Vec<(f64, f64)> {
        self.ticks
            .iter()
            .filter_map(|k| k.agent(agent).map(|a| (k.t, a.h_pred)))
            .collect()
    }

    pub fn planned_target(&self, step: usize, agent_index: usize) -> Option<PoiId> {
        self.pointing_plan
            .get(step)
            .and_then(|row| row.get(agent_index))
            .copied()
            .flatten()
    }
}
