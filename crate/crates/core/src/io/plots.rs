//! Plot-ready data files: real vs nominal cost, per-agent fault signal and
//! per-agent metric vs threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::io::export::{read_csv, write_csv, AGENT_COSTS_FILE, FDI_FILE, GLOBAL_FILE};
use crate::sim::{AgentCostRecord, FdiRecord, GlobalRecord, TelemetryLog};
use crate::{AgentId, Result};

pub const COST_PLOT_FILE: &str = "plot_cost.csv";
pub const SIGNAL_PLOT_FILE: &str = "plot_fault_signal.csv";

pub fn threshold_plot_file(agent: AgentId) -> String {
    format!("plot_threshold_agent_{agent}.csv")
}

pub fn emit_plots(log: &TelemetryLog, outdir: &Path) -> Result<Vec<PathBuf>> {
    let agents: BTreeSet<AgentId> = log.agent_costs.iter().map(|r| r.agent).collect();
    write_plots(&log.global, &log.fdi, &agents, outdir)
}

/// Rebuilds the plot files from telemetry previously written to `dir`.
pub fn emit_plots_from_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let global: Vec<GlobalRecord> = read_csv(&dir.join(GLOBAL_FILE))?;
    let fdi: Vec<FdiRecord> = read_csv(&dir.join(FDI_FILE))?;
    let costs: Vec<AgentCostRecord> = read_csv(&dir.join(AGENT_COSTS_FILE))?;
    let agents = costs.iter().map(|r| r.agent).collect();
    write_plots(&global, &fdi, &agents, dir)
}

fn write_plots(
    global: &[GlobalRecord],
    fdi: &[FdiRecord],
    agents: &BTreeSet<AgentId>,
    outdir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut files = vec![write_csv(
        &outdir.join(COST_PLOT_FILE),
        &["t", "h_real", "h_nom"],
        global.iter().map(|g| (g.t, g.h_real, g.h_nom)),
    )?];

    let flagged: BTreeSet<(u64, AgentId)> = fdi
        .iter()
        .filter(|r| r.flagged)
        .map(|r| (r.t.to_bits(), r.agent))
        .collect();
    let mut header = vec!["t".to_string()];
    header.extend(agents.iter().map(|a| format!("agent_{a}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = global.iter().map(|g| {
        let mut row = vec![g.t.to_string()];
        row.extend(
            agents
                .iter()
                .map(|&a| u8::from(flagged.contains(&(g.t.to_bits(), a))).to_string()),
        );
        row
    });
    files.push(write_csv(
        &outdir.join(SIGNAL_PLOT_FILE),
        &header_refs,
        rows,
    )?);

    let mut per_agent: BTreeMap<AgentId, Vec<&FdiRecord>> =
        agents.iter().map(|&a| (a, Vec::new())).collect();
    for r in fdi {
        per_agent.entry(r.agent).or_default().push(r);
    }
    for (agent, rows) in per_agent {
        files.push(write_csv(
            &outdir.join(threshold_plot_file(agent)),
            &["t", "metric", "tau"],
            rows.iter().map(|r| (r.t, r.metric, r.tau)),
        )?);
    }
    Ok(files)
}
