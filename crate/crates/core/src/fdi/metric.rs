//! Fault metric `H_m = |1 − ΔH/ΔH^pred|` and the sign/ratio performance
//! classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::AgentId;

/// Tolerance on `|x − 1|` below which progress counts as nominal.
pub const NOMINAL_TOL: f64 = 1e-9;

/// Relative size below which `ΔH^pred` is treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Nominal,
    Improved,
    Deteriorating,
    /// No progress was expected (`ΔH^pred ≈ 0`), so the ratio is undefined.
    Indeterminate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Nominal => "nominal",
            Classification::Improved => "improved",
            Classification::Deteriorating => "deteriorating",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Differences, ratio and metric for one agent over one FDI window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValues {
    pub delta_h: f64,
    pub delta_h_pred: f64,
    /// `ΔH/ΔH^pred`; `None` when the denominator is degenerate.
    pub ratio_x: Option<f64>,
    pub metric: Option<f64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultMetricRecord {
    pub agent: AgentId,
    pub t: f64,
    pub h_now: f64,
    pub h_prev: f64,
    pub h_pred: f64,
    pub delta_h: f64,
    pub delta_h_pred: f64,
    pub ratio_x: Option<f64>,
    pub metric: Option<f64>,
    pub classification: Classification,
}

impl FaultMetricRecord {
    pub fn new(agent: AgentId, t: f64, h_now: f64, h_prev: f64, h_pred: f64) -> Self {
        let v = fault_metric(h_now, h_prev, h_pred);
        Self {
            agent,
            t,
            h_now,
            h_prev,
            h_pred,
            delta_h: v.delta_h,
            delta_h_pred: v.delta_h_pred,
            ratio_x: v.ratio_x,
            metric: v.metric,
            classification: v.classification,
        }
    }
}

/// True when `|h_pred − h_prev|` is too small to divide by.
pub fn is_degenerate(h_pred: f64, h_prev: f64) -> bool {
    let scale = h_pred.abs().max(h_prev.abs()).max(1.0);
    (h_pred - h_prev).abs() < DEGENERATE_TOL * scale
}

pub fn fault_metric(h_now: f64, h_prev: f64, h_pred_now: f64) -> MetricValues {
    let delta_h = h_now - h_prev;
    let delta_h_pred = h_pred_now - h_prev;
    if is_degenerate(h_pred_now, h_prev) {
        return MetricValues {
            delta_h,
            delta_h_pred,
            ratio_x: None,
            metric: None,
            classification: Classification::Indeterminate,
        };
    }
    let x = delta_h / delta_h_pred;
    MetricValues {
        delta_h,
        delta_h_pred,
        ratio_x: Some(x),
        metric: Some((1.0 - x).abs()),
        classification: classify(delta_h, delta_h_pred, x),
    }
}

/// Performance classification from the signs of the two differences and
/// their ratio `x`.
///
/// | condition                               | result        |
/// |-----------------------------------------|---------------|
/// | `ΔH^pred = 0`                           | indeterminate |
/// | `sign(ΔH) ≠ sign(ΔH^pred)`              | deteriorating |
/// | same sign, `x = 1`                      | nominal       |
/// | same sign, `x < 1`                      | deteriorating |
/// | same sign, `x > 1`                      | improved      |
pub fn classify(delta_h: f64, delta_h_pred: f64, ratio_x: f64) -> Classification {
    if delta_h_pred == 0.0 || !ratio_x.is_finite() {
        return Classification::Indeterminate;
    }
    if sign(delta_h) != sign(delta_h_pred) {
        Classification::Deteriorating
    } else if (ratio_x - 1.0).abs() <= NOMINAL_TOL {
        Classification::Nominal
    } else if ratio_x < 1.0 {
        Classification::Deteriorating
    } else {
        Classification::Improved
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
