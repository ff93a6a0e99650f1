//! Append-only record of a run.

use serde::{Deserialize, Serialize};

use crate::fdi::{AgentEvaluation, Classification, FaultReport};
use crate::info_cost::CostBreakdown;
use crate::{AgentId, PoiId};

/// Agent state, pose and sensing summary after a simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub t: f64,
    pub agent: AgentId,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
    pub target_poi: Option<PoiId>,
    pub visible_count: usize,
    pub connected: bool,
}

/// `H_i` as seen by the monitor on a fusion or FDI tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentCostRecord {
    pub t: f64,
    pub agent: AgentId,
    /// Exact contribution from a fresh decomposition (fusion ticks only).
    pub fused: Option<f64>,
    /// Value held by the monitor after this tick's transmission.
    pub reported: f64,
    pub connected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalRecord {
    pub t: f64,
    pub h_real: f64,
    pub h_nom: f64,
    pub integral: f64,
    pub global_flag: bool,
}

/// Flattened metric + threshold + decision row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdiRecord {
    pub t: f64,
    pub agent: AgentId,
    pub h_now: f64,
    pub h_prev: f64,
    pub h_pred: f64,
    pub delta_h: f64,
    pub delta_h_pred: f64,
    pub ratio_x: Option<f64>,
    pub metric: Option<f64>,
    pub classification: Classification,
    pub tau: Option<f64>,
    pub tau_fallback: Option<bool>,
    pub sample_count: Option<usize>,
    pub candidates_kept: Option<usize>,
    pub epsilon: Option<f64>,
    pub flagged: bool,
}

impl From<&AgentEvaluation> for FdiRecord {
    fn from(e: &AgentEvaluation) -> Self {
        let m = &e.metric;
        let th = e.threshold.as_ref();
        Self {
            t: m.t,
            agent: m.agent,
            h_now: m.h_now,
            h_prev: m.h_prev,
            h_pred: m.h_pred,
            delta_h: m.delta_h,
            delta_h_pred: m.delta_h_pred,
            ratio_x: m.ratio_x,
            metric: m.metric,
            classification: m.classification,
            tau: th.map(|t| t.tau),
            tau_fallback: th.map(|t| t.fallback),
            sample_count: th.map(|t| t.sample_count),
            candidates_kept: th.map(|t| t.candidates_kept),
            epsilon: th.map(|t| t.epsilon),
            flagged: e.flagged,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TelemetryLog {
    pub states: Vec<StateRecord>,
    pub fusions: Vec<CostBreakdown>,
    pub agent_costs: Vec<AgentCostRecord>,
    pub global: Vec<GlobalRecord>,
    pub fdi: Vec<FdiRecord>,
    pub reports: Vec<FaultReport>,
}

impl TelemetryLog {
    pub fn fdi_for(&self, agent: AgentId) -> impl Iterator<Item = &FdiRecord> + '_ {
        self.fdi.iter().filter(move |r| r.agent == agent)
    }

    pub fn states_for(&self, agent: AgentId) -> impl Iterator<Item = &StateRecord> + '_ {
        self.states.iter().filter(move |r| r.agent == agent)
    }

    /// Times at which `agent` was flagged.
    pub fn flag_times(&self, agent: AgentId) -> Vec<f64> {
        self.fdi_for(agent)
            .filter(|r| r.flagged)
            .map(|r| r.t)
            .collect()
    }

    /// Final value of the global gap integral.
    pub fn final_integral(&self) -> Option<f64> {
        self.global.last().map(|g| g.integral)
    }
}
