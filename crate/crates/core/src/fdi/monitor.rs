//! The centralized monitor: per-agent metric, threshold and detection at
//! every FDI tick plus the global integral test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fdi::integral::IntegralDetector;
use crate::fdi::metric::{Classification, FaultMetricRecord};
use crate::fdi::prediction::PredictedAgentTick;
use crate::fdi::threshold::{
    compute_threshold, fallback_threshold, sample_candidate_sets, SamplingContext, ThresholdRecord,
};
use crate::geometry::{CameraModel, PoiModel, TargetBody};
use crate::info_cost::{agent_contribution, PsiTable};
use crate::rng;
use crate::{AgentId, PoiId};

/// Which previous cost the differences are taken against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Differencing {
    /// Measured `H_i(t − Δt)` for both differences.
    #[default]
    Mixed,
    /// Predicted `H_i^pred(t − Δt)` for both differences.
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdiSettings {
    pub epsilon: f64,
    pub n_samples: usize,
    pub tau_floor: f64,
    pub delta_threshold: f64,
    pub differencing: Differencing,
    pub master_seed: u64,
    pub sigma_scale: f64,
}

/// Telemetry from one agent as received by the monitor.
#[derive(Debug, Clone, Copy)]
pub struct AgentReport<'a> {
    pub agent: AgentId,
    pub connected: bool,
    pub reported: f64,
    pub camera: &'a CameraModel,
    pub predicted: &'a PredictedAgentTick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedAgent {
    pub agent: AgentId,
    pub classification: Classification,
    pub metric: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultReport {
    pub t: f64,
    pub flagged_agents: Vec<FlaggedAgent>,
    pub global_integral_flag: bool,
    pub integral: f64,
}

impl FaultReport {
    pub fn is_flagged(&self, agent: AgentId) -> bool {
        self.flagged_agents.iter().any(|f| f.agent == agent)
    }
}

/// Per-agent outcome at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentEvaluation {
    pub metric: FaultMetricRecord,
    pub threshold: Option<ThresholdRecord>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdiOutput {
    pub evaluations: Vec<AgentEvaluation>,
    pub report: FaultReport,
}

#[derive(Debug, Clone, Copy)]
struct AgentHistory {
    reported: f64,
    predicted: f64,
}

pub fn detect(metric: &FaultMetricRecord, threshold: &ThresholdRecord) -> bool {
    metric.metric.is_some_and(|m| m > threshold.tau)
}

#[derive(Debug, Clone)]
pub struct Monitor {
    settings: FdiSettings,
    history: BTreeMap<AgentId, AgentHistory>,
    integral: IntegralDetector,
}

impl Monitor {
    pub fn new(settings: FdiSettings) -> Self {
        Self {
            settings,
            history: BTreeMap::new(),
            integral: IntegralDetector::new(settings.delta_threshold),
        }
    }

    pub fn settings(&self) -> &FdiSettings {
        &self.settings
    }

    /// Processes one FDI tick. Agents heard from for the first time only
    /// set the baseline; disconnected agents are skipped and keep their
    /// previous baseline.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        &mut self,
        tick: u64,
        t: f64,
        reports: &[AgentReport<'_>],
        psi: &PsiTable,
        pois: &[PoiModel],
        body: &TargetBody,
        h_real: f64,
        h_nom: f64,
    ) -> FdiOutput {
        let index: BTreeMap<PoiId, &PoiModel> = pois.iter().map(|p| (p.id, p)).collect();
        let mut evaluations = Vec::new();
        let mut flagged_agents = Vec::new();

        for r in reports.iter().filter(|r| r.connected) {
            let h_pred = agent_contribution(
                r.predicted.visible.iter().map(|&(id, s)| (index[&id], s)),
                psi,
            );
            let h_now = r.reported;
            let previous = self.history.insert(
                r.agent,
                AgentHistory {
                    reported: h_now,
                    predicted: h_pred,
                },
            );
            let Some(prev) = previous else { continue };
            let h_prev = match self.settings.differencing {
                Differencing::Mixed => prev.reported,
                Differencing::Predicted => prev.predicted,
            };
            let metric = FaultMetricRecord::new(r.agent, t, h_now, h_prev, h_pred);
            let threshold = metric.metric.map(|_| {
                self.threshold(tick, t, r, &index, psi, pois, body, h_pred, h_prev, h_now)
            });
            let flagged = threshold.as_ref().is_some_and(|th| detect(&metric, th));
            if flagged {
                flagged_agents.push(FlaggedAgent {
                    agent: r.agent,
                    classification: metric.classification,
                    metric: metric.metric.unwrap_or_default(),
                    tau: threshold.map_or(0.0, |th| th.tau),
                });
            }
            evaluations.push(AgentEvaluation {
                metric,
                threshold,
                flagged,
            });
        }

        let sample = self.integral.push(t, h_real, h_nom);
        FdiOutput {
            evaluations,
            report: FaultReport {
                t,
                flagged_agents,
                global_integral_flag: sample.flag,
                integral: sample.integral,
            },
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn threshold(
        &self,
        tick: u64,
        t: f64,
        r: &AgentReport<'_>,
        index: &BTreeMap<PoiId, &PoiModel>,
        psi: &PsiTable,
        pois: &[PoiModel],
        body: &TargetBody,
        h_pred: f64,
        h_prev: f64,
        h_now: f64,
    ) -> ThresholdRecord {
        let s = &self.settings;
        let mut stream = rng::stream(rng::derive_seed(
            s.master_seed,
            &[rng::TAG_THRESHOLD, u64::from(r.agent), tick],
        ));
        let ctx = SamplingContext {
            observer_position: r.predicted.position,
            camera: r.camera,
            pois,
            body,
            sigma_scale: s.sigma_scale,
        };
        let target = r.predicted.target_poi.map(|id| index[&id]);
        sample_candidate_sets(
            r.agent,
            t,
            target,
            &ctx,
            s.epsilon,
            s.n_samples,
            &mut stream,
        )
        .and_then(|candidates| {
            let costs: Vec<f64> = candidates.iter().map(|c| c.cost(index, psi)).collect();
            compute_threshold(r.agent, t, &costs, h_pred, h_prev, h_now, s.epsilon)
        })
        .unwrap_or_else(|_| fallback_threshold(r.agent, t, s.tau_floor, s.n_samples, s.epsilon))
    }
}
