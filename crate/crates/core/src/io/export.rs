//! CSV and JSON-lines telemetry files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fdi::NominalPrediction;
use crate::sim::TelemetryLog;
use crate::Result;

pub const STATES_FILE: &str = "states.csv";
pub const AGENT_COSTS_FILE: &str = "agent_costs.csv";
pub const FUSION_FILE: &str = "fusion.csv";
pub const GLOBAL_FILE: &str = "global.csv";
pub const FDI_FILE: &str = "fdi.csv";
pub const REPORTS_FILE: &str = "fault_reports.jsonl";
pub const PREDICTION_FILE: &str = "prediction.csv";
pub const NOMINAL_FILE: &str = "nominal.csv";

pub const STATES_HEADER: &[&str] = &[
    "t",
    "agent",
    "x",
    "y",
    "z",
    "vx",
    "vy",
    "vz",
    "bx",
    "by",
    "bz",
    "target_poi",
    "visible_count",
    "connected",
];
pub const AGENT_COSTS_HEADER: &[&str] = &["t", "agent", "fused", "reported", "connected"];
pub const FUSION_HEADER: &[&str] = &[
    "t",
    "total_h",
    "prior_term",
    "sum_agent_terms",
    "identity_residual",
];
pub const GLOBAL_HEADER: &[&str] = &["t", "h_real", "h_nom", "integral", "global_flag"];
pub const FDI_HEADER: &[&str] = &[
    "t",
    "agent",
    "h_now",
    "h_prev",
    "h_pred",
    "delta_h",
    "delta_h_pred",
    "ratio_x",
    "metric",
    "classification",
    "tau",
    "tau_fallback",
    "sample_count",
    "candidates_kept",
    "epsilon",
    "flagged",
];
pub const PREDICTION_HEADER: &[&str] = &["t", "agent", "h_pred", "target_poi", "visible_count"];
pub const NOMINAL_HEADER: &[&str] = &["t", "h_nom"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionRow {
    pub t: f64,
    pub total_h: f64,
    pub prior_term: f64,
    pub sum_agent_terms: f64,
    pub identity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub t: f64,
    pub agent: u32,
    pub h_pred: f64,
    pub target_poi: Option<u32>,
    pub visible_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalRow {
    pub t: f64,
    pub h_nom: f64,
}

/// Writes `rows` under an explicit header, so empty tables still carry
/// their column names.
pub fn write_csv<T: Serialize>(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<PathBuf> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write_telemetry(log: &TelemetryLog, dir: &Path) -> Result<Vec<PathBuf>> {
    let fusion_rows = log.fusions.iter().map(|b| FusionRow {
        t: b.timestamp,
        total_h: b.total_h,
        prior_term: b.prior_term,
        sum_agent_terms: b.agent_terms.values().fold(0.0, |a, v| a + v),
        identity_residual: b.identity_residual(),
    });
    let mut files = vec![
        write_csv(&dir.join(STATES_FILE), STATES_HEADER, &log.states)?,
        write_csv(
            &dir.join(AGENT_COSTS_FILE),
            AGENT_COSTS_HEADER,
            &log.agent_costs,
        )?,
        write_csv(&dir.join(FUSION_FILE), FUSION_HEADER, fusion_rows)?,
        write_csv(&dir.join(GLOBAL_FILE), GLOBAL_HEADER, &log.global)?,
        write_csv(&dir.join(FDI_FILE), FDI_HEADER, &log.fdi)?,
    ];
    let path = dir.join(REPORTS_FILE);
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    for report in &log.reports {
        serde_json::to_writer(&mut out, report)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    files.push(path);
    Ok(files)
}

pub fn write_prediction(prediction: &NominalPrediction, dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = prediction.ticks.iter().flat_map(|tick| {
        tick.agents.iter().map(move |a| PredictionRow {
            t: tick.t,
            agent: a.agent,
            h_pred: a.h_pred,
            target_poi: a.target_poi,
            visible_count: a.visible.len(),
        })
    });
    let nominal = prediction.ticks.iter().map(|k| NominalRow {
        t: k.t,
        h_nom: k.h_nom,
    });
    Ok(vec![
        write_csv(&dir.join(PREDICTION_FILE), PREDICTION_HEADER, rows)?,
        write_csv(&dir.join(NOMINAL_FILE), NOMINAL_HEADER, nominal)?,
    ])
}
