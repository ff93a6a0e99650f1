#![allow(dead_code)]

use std::path::PathBuf;

use swarm_fdi::faults::{FaultKind, FaultSpec};
use swarm_fdi::geometry::{CameraModel, TargetBody};
use swarm_fdi::info_cost::FusionSchedule;
use swarm_fdi::io::load_scenario;
use swarm_fdi::orbit::ProParameters;
use swarm_fdi::sim::{AgentConfig, EnvironmentConfig, FdiConfig, PoiLayout, ScenarioConfig};
use swarm_fdi::Vec3;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

pub fn shipped(name: &str) -> ScenarioConfig {
    load_scenario(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn orbit(ar: f64, ac: f64, phase: f64) -> ProParameters {
    ProParameters {
        radial_amplitude: ar,
        along_track_offset: 0.0,
        cross_track_amplitude: ac,
        phase_radial: phase,
        phase_cross: phase,
    }
}

/// Small scenario: `agents` observers around a 5 m sphere with 60 POIs,
/// 60 s fusion/FDI cadence at 3 s steps.
pub fn small(agents: u32, horizon_orbits: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: "small".into(),
        master_seed: 5,
        sim_dt: 3.0,
        horizon_orbits,
        comm_radius: f64::INFINITY,
        monitor_position: Vec3::zeros(),
        sigma_scale: 1.0,
        environment: EnvironmentConfig {
            mean_motion_n: 0.00113,
        },
        schedule: FusionSchedule {
            omega_g: 1.0 / 60.0,
            omega_fdi: 1.0 / 60.0,
        },
        target: TargetBody::Sphere { radius: 5.0 },
        fdi: FdiConfig::default(),
        poi_layout: Some(PoiLayout::FibonacciSphere {
            count: 60,
            radius: None,
            importance: 1.0,
            prior_variance: 1.0e8,
        }),
        agents: (0..agents)
            .map(|id| AgentConfig {
                id,
                orbit: orbit(
                    10.0,
                    15.0,
                    std::f64::consts::TAU * id as f64 / agents.max(1) as f64,
                ),
                camera: CameraModel {
                    half_angle_fov: 0.35,
                    max_range: 1.0e5,
                },
            })
            .collect(),
        pois: Vec::new(),
        faults: Vec::new(),
    }
}

pub fn fault(agent: u32, kind: FaultKind, onset: f64, magnitude: f64) -> FaultSpec {
    FaultSpec {
        target_agent: agent,
        kind,
        onset_time: onset,
        magnitude,
        rng_seed: None,
    }
}
