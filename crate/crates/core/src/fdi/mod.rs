//! Fault detection and identification from information-cost telemetry.
//!
//! Each FDI tick the monitor compares an agent's reported cost change
//! `ΔH_i = H_i(t) − H_i(t−Δt)` with the change expected from a fault-free
//! replica, `ΔH_i^pred = H_i^pred(t) − H_i(t−Δt)`, and flags the agent when
//! `|1 − ΔH_i/ΔH_i^pred|` exceeds an adaptive threshold.
//!
//! `H_i^pred(t)` is re-evaluated on the monitor's latest fused ψ using the
//! replica's visible set and σ, so a healthy agent's report matches it
//! exactly even when another agent's fault has shifted ψ.

pub mod integral;
pub mod metric;
pub mod monitor;
pub mod prediction;
pub mod threshold;

pub use integral::{gap_integral, integral_detector, IntegralDetector, IntegralSample};
pub use metric::{classify, fault_metric, Classification, FaultMetricRecord, MetricValues};
pub use monitor::{
    detect, AgentEvaluation, AgentReport, Differencing, FaultReport, FdiOutput, FdiSettings,
    FlaggedAgent, Monitor,
};
pub use prediction::{NominalPrediction, PredictedAgentTick, PredictedTick};
pub use threshold::{
    candidate_taus, compute_threshold, sample_candidate_sets, CandidateSet, SamplingContext,
    ThresholdRecord,
};

pub use crate::sim::predict_nominal;
