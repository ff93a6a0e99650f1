//! Scenario description: environment, agents, POIs, faults and FDI knobs.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::faults::FaultSpec;
use crate::fdi::{Differencing, FdiSettings};
use crate::geometry::{CameraModel, PoiModel, TargetBody};
use crate::info_cost::FusionSchedule;
use crate::orbit::{OrbitEnvironment, ProParameters};
use crate::{AgentId, Error, PoiId, Result, ValidationErrors, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub master_seed: u64,
    /// Simulation step, s.
    #[serde(default = "default_sim_dt")]
    pub sim_dt: f64,
    #[serde(default = "default_horizon_orbits")]
    pub horizon_orbits: f64,
    /// Inter-agent and agent-to-monitor link range, m.
    #[serde(default = "default_comm_radius")]
    pub comm_radius: f64,
    #[serde(default = "Vec3::zeros", with = "crate::io::vec3")]
    pub monitor_position: Vec3,
    /// Proportionality constant of σ = c·dist².
    #[serde(default = "one")]
    pub sigma_scale: f64,
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub schedule: FusionSchedule,
    pub target: TargetBody,
    #[serde(default)]
    pub fdi: FdiConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poi_layout: Option<PoiLayout>,
    #[serde(default)]
    pub agents: Vec<AgentConfig>,
    #[serde(default)]
    pub pois: Vec<PoiModel>,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    /// Target mean motion, rad/s.
    pub mean_motion_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub id: AgentId,
    pub orbit: ProParameters,
    #[serde(default)]
    pub camera: CameraModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdiConfig {
    /// Aim-point neighborhood radius, m. Derived from the actuator design
    /// noise when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default = "default_epsilon_scale")]
    pub epsilon_scale: f64,
    /// Actuator noise level the ε default is sized for, m/s².
    #[serde(default = "default_design_noise")]
    pub design_actuator_noise: f64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_tau_floor")]
    pub tau_floor: f64,
    /// Global integral test level, cost units.
    #[serde(default = "one")]
    pub delta_threshold: f64,
    #[serde(default)]
    pub differencing: Differencing,
}

impl Default for FdiConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            epsilon_scale: default_epsilon_scale(),
            design_actuator_noise: default_design_noise(),
            n_samples: default_n_samples(),
            tau_floor: default_tau_floor(),
            delta_threshold: 1.0,
            differencing: Differencing::Mixed,
        }
    }
}

/// Generated POI sets, appended after any explicit `pois`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PoiLayout {
    /// Quasi-uniform points on a sphere (the target sphere by default).
    FibonacciSphere {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default = "one")]
        importance: f64,
        prior_variance: f64,
    },
    /// `per_edge × per_edge` grid on each face of the target box.
    BoxFaces {
        per_edge: usize,
        #[serde(default = "one")]
        importance: f64,
        prior_variance: f64,
    },
}

fn default_name() -> String {
    "scenario".to_string()
}
fn default_sim_dt() -> f64 {
    3.0
}
fn default_horizon_orbits() -> f64 {
    2.0
}
fn default_comm_radius() -> f64 {
    f64::INFINITY
}
fn one() -> f64 {
    1.0
}
fn default_epsilon_scale() -> f64 {
    0.5
}
fn default_design_noise() -> f64 {
    1e-3
}
fn default_n_samples() -> usize {
    10
}
fn default_tau_floor() -> f64 {
    0.05
}

/// Steps of `dt` per period `1/omega`, when that is a positive integer.
fn cadence(omega: f64, dt: f64) -> Option<u64> {
    let k = 1.0 / (omega * dt);
    let r = k.round();
    (k.is_finite() && r >= 1.0 && (k - r).abs() <= 1e-9 * r).then_some(r as u64)
}

pub fn fibonacci_sphere(
    count: usize,
    radius: f64,
    first_id: PoiId,
    importance: f64,
    prior_variance: f64,
) -> Vec<PoiModel> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            let normal = Vec3::new(r * phi.cos(), r * phi.sin(), z).normalize();
            PoiModel {
                id: first_id + k as PoiId,
                position: normal * radius,
                normal,
                importance,
                prior_variance,
            }
        })
        .collect()
}

pub fn box_faces(
    half_extents: Vec3,
    per_edge: usize,
    first_id: PoiId,
    importance: f64,
    prior_variance: f64,
) -> Vec<PoiModel> {
    let mut out = Vec::with_capacity(6 * per_edge * per_edge);
    let cell = |k: usize| -1.0 + (2.0 * k as f64 + 1.0) / per_edge as f64;
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [1.0, -1.0] {
            for i in 0..per_edge {
                for j in 0..per_edge {
                    let mut normal = Vec3::zeros();
                    normal[axis] = side;
                    let mut p = Vec3::zeros();
                    p[axis] = side * half_extents[axis];
                    p[u] = cell(i) * half_extents[u];
                    p[v] = cell(j) * half_extents[v];
                    out.push(PoiModel {
                        id: first_id + out.len() as PoiId,
                        position: p,
                        normal,
                        importance,
                        prior_variance,
                    });
                }
            }
        }
    }
    out
}

impl ScenarioConfig {
    pub fn environment(&self) -> Result<OrbitEnvironment> {
        OrbitEnvironment::new(self.environment.mean_motion_n).ok_or_else(|| {
            let mut errs = ValidationErrors::default();
            errs.push("environment.mean_motion_n", "must be finite and > 0");
            Error::Validation(errs)
        })
    }

    pub fn horizon_seconds(&self) -> f64 {
        self.horizon_orbits * std::f64::consts::TAU / self.environment.mean_motion_n
    }

    /// Number of simulation steps after the initial instant.
    pub fn step_count(&self) -> u64 {
        (self.horizon_seconds() / self.sim_dt + 1e-9).floor() as u64
    }

    /// Simulation steps between fusion ticks.
    pub fn fusion_every(&self) -> Option<u64> {
        cadence(self.schedule.omega_g, self.sim_dt)
    }

    /// Simulation steps between FDI ticks.
    pub fn fdi_every(&self) -> Option<u64> {
        cadence(self.schedule.omega_fdi, self.sim_dt)
    }

    /// Aim-point neighborhood radius: explicit, or
    /// `epsilon_scale · design_actuator_noise · (1/ω_FDI)²`.
    pub fn epsilon(&self) -> f64 {
        self.fdi.epsilon.unwrap_or_else(|| {
            let window = 1.0 / self.schedule.omega_fdi;
            self.fdi.epsilon_scale * self.fdi.design_actuator_noise * window * window
        })
    }

    pub fn fdi_settings(&self) -> FdiSettings {
        FdiSettings {
            epsilon: self.epsilon(),
            n_samples: self.fdi.n_samples,
            tau_floor: self.fdi.tau_floor,
            delta_threshold: self.fdi.delta_threshold,
            differencing: self.fdi.differencing,
            master_seed: self.master_seed,
            sigma_scale: self.sigma_scale,
        }
    }

    fn layout_pois(&self) -> Vec<PoiModel> {
        let first = self.pois.iter().map(|p| p.id + 1).max().unwrap_or(0);
        match self.poi_layout {
            None => Vec::new(),
            Some(PoiLayout::FibonacciSphere {
                count,
                radius,
                importance,
                prior_variance,
            }) => {
                let r = radius.unwrap_or(match self.target {
                    TargetBody::Sphere { radius } => radius,
                    TargetBody::Box { half_extents } => half_extents.norm(),
                });
                fibonacci_sphere(count, r, first, importance, prior_variance)
            }
            Some(PoiLayout::BoxFaces {
                per_edge,
                importance,
                prior_variance,
            }) => match self.target {
                TargetBody::Box { half_extents } => {
                    box_faces(half_extents, per_edge, first, importance, prior_variance)
                }
                TargetBody::Sphere { .. } => Vec::new(),
            },
        }
    }

    /// Explicit form: generated POIs materialized, agents and POIs sorted
    /// by id. Simulation and hashing work on this form.
    pub fn expanded(&self) -> ScenarioConfig {
        let mut out = self.clone();
        out.pois.extend(self.layout_pois());
        out.poi_layout = None;
        out.pois.sort_by_key(|p| p.id);
        out.agents.sort_by_key(|a| a.id);
        out
    }

    /// Same scenario with every fault removed.
    pub fn without_faults(&self) -> ScenarioConfig {
        ScenarioConfig {
            faults: Vec::new(),
            ..self.clone()
        }
    }

    /// Checks every invariant and reports all violations.
    pub fn validate(&self) -> Result<()> {
        let mut e = ValidationErrors::default();
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;

        if !finite_pos(self.environment.mean_motion_n) {
            e.push("environment.mean_motion_n", "must be finite and > 0");
        }
        if !finite_pos(self.sim_dt) {
            e.push("sim_dt", "must be finite and > 0");
        }
        if !finite_pos(self.horizon_orbits) {
            e.push("horizon_orbits", "must be finite and > 0");
        }
        if self.comm_radius.is_nan() || self.comm_radius <= 0.0 {
            e.push("comm_radius", "must be > 0 (inf allowed)");
        }
        if !self.monitor_position.iter().all(|v| v.is_finite()) {
            e.push("monitor_position", "must be finite");
        }
        if !finite_pos(self.sigma_scale) {
            e.push("sigma_scale", "must be finite and > 0");
        }

        let s = &self.schedule;
        if !finite_pos(s.omega_fdi) {
            e.push("schedule.omega_fdi", "must be finite and > 0");
        }
        if !finite_pos(s.omega_g) {
            e.push("schedule.omega_g", "must be finite and > 0");
        } else if s.omega_g < s.omega_fdi {
            e.push("schedule.omega_g", "must be ≥ omega_fdi");
        }
        if finite_pos(self.sim_dt) {
            if finite_pos(s.omega_g) && self.fusion_every().is_none() {
                e.push(
                    "schedule.omega_g",
                    "1/(omega_g·sim_dt) must be a positive integer",
                );
            }
            if finite_pos(s.omega_fdi) && self.fdi_every().is_none() {
                e.push(
                    "schedule.omega_fdi",
                    "1/(omega_fdi·sim_dt) must be a positive integer",
                );
            }
        }

        match self.target {
            TargetBody::Sphere { radius } => {
                if !finite_pos(radius) {
                    e.push("target.radius", "must be finite and > 0");
                }
            }
            TargetBody::Box { half_extents } => {
                if !half_extents.iter().all(|&v| finite_pos(v)) {
                    e.push(
                        "target.half_extents",
                        "all components must be finite and > 0",
                    );
                }
            }
        }

        let mut agent_ids = BTreeSet::new();
        for (k, a) in self.agents.iter().enumerate() {
            let path = format!("agents[{k}]");
            if !agent_ids.insert(a.id) {
                e.push(format!("{path}.id"), format!("duplicate agent id {}", a.id));
            }
            let o = &a.orbit;
            for (name, v) in [
                ("radial_amplitude", o.radial_amplitude),
                ("cross_track_amplitude", o.cross_track_amplitude),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    e.push(format!("{path}.orbit.{name}"), "must be finite and ≥ 0");
                }
            }
            for (name, v) in [
                ("along_track_offset", o.along_track_offset),
                ("phase_radial", o.phase_radial),
                ("phase_cross", o.phase_cross),
            ] {
                if !v.is_finite() {
                    e.push(format!("{path}.orbit.{name}"), "must be finite");
                }
            }
            let c = &a.camera;
            if !(c.half_angle_fov > 0.0 && c.half_angle_fov < FRAC_PI_2) {
                e.push(
                    format!("{path}.camera.half_angle_fov"),
                    "must lie in (0, π/2)",
                );
            }
            if c.max_range.is_nan() || c.max_range <= 0.0 {
                e.push(format!("{path}.camera.max_range"), "must be > 0");
            }
        }

        if let Some(layout) = &self.poi_layout {
            let (count, importance, prior_variance) = match *layout {
                PoiLayout::FibonacciSphere {
                    count,
                    radius,
                    importance,
                    prior_variance,
                } => {
                    if radius.is_some_and(|r| !finite_pos(r)) {
                        e.push("poi_layout.radius", "must be finite and > 0");
                    }
                    (count, importance, prior_variance)
                }
                PoiLayout::BoxFaces {
                    per_edge,
                    importance,
                    prior_variance,
                } => {
                    if !matches!(self.target, TargetBody::Box { .. }) {
                        e.push("poi_layout.kind", "box_faces requires a box target");
                    }
                    (per_edge, importance, prior_variance)
                }
            };
            if count == 0 {
                e.push("poi_layout.count", "must be ≥ 1");
            }
            if !(importance.is_finite() && importance >= 0.0) {
                e.push("poi_layout.importance", "must be finite and ≥ 0");
            }
            if !finite_pos(prior_variance) {
                e.push("poi_layout.prior_variance", "must be finite and > 0");
            }
        }

        let mut poi_ids = BTreeSet::new();
        let explicit = self.pois.len();
        for (k, p) in self
            .pois
            .iter()
            .chain(self.layout_pois().iter())
            .enumerate()
        {
            let path = if k < explicit {
                format!("pois[{k}]")
            } else {
                format!("poi_layout[{}]", k - explicit)
            };
            if !poi_ids.insert(p.id) {
                e.push(format!("{path}.id"), format!("duplicate POI id {}", p.id));
            }
            if !(p.importance.is_finite() && p.importance >= 0.0) {
                e.push(format!("{path}.importance"), "must be finite and ≥ 0");
            }
            if !finite_pos(p.prior_variance) {
                e.push(format!("{path}.prior_variance"), "must be finite and > 0");
            }
            if !p.position.iter().all(|v| v.is_finite()) {
                e.push(format!("{path}.position"), "must be finite");
            } else if !self.target.is_outside_or_on(&p.position) {
                e.push(format!("{path}.position"), "lies inside the target body");
            }
            let off_unit = (p.normal.norm() - 1.0).abs();
            if off_unit.is_nan() || off_unit > 1e-9 {
                e.push(format!("{path}.normal"), "must be a unit vector");
            }
        }

        let known: BTreeMap<AgentId, ()> = self.agents.iter().map(|a| (a.id, ())).collect();
        for (k, f) in self.faults.iter().enumerate() {
            let path = format!("faults[{k}]");
            if !known.contains_key(&f.target_agent) {
                e.push(
                    format!("{path}.target_agent"),
                    format!("unknown agent {}", f.target_agent),
                );
            }
            if !(f.onset_time.is_finite() && f.onset_time >= 0.0) {
                e.push(format!("{path}.onset_time"), "must be finite and ≥ 0");
            }
            if !(f.magnitude.is_finite() && f.magnitude >= 0.0) {
                e.push(format!("{path}.magnitude"), "must be finite and ≥ 0");
            }
        }

        let f = &self.fdi;
        if f.epsilon.is_some_and(|v| !(v.is_finite() && v >= 0.0)) {
            e.push("fdi.epsilon", "must be finite and ≥ 0");
        }
        if !(f.epsilon_scale.is_finite() && f.epsilon_scale >= 0.0) {
            e.push("fdi.epsilon_scale", "must be finite and ≥ 0");
        }
        if !(f.design_actuator_noise.is_finite() && f.design_actuator_noise >= 0.0) {
            e.push("fdi.design_actuator_noise", "must be finite and ≥ 0");
        }
        if f.n_samples == 0 {
            e.push("fdi.n_samples", "must be ≥ 1");
        }
        if !(f.tau_floor.is_finite() && f.tau_floor >= 0.0) {
            e.push("fdi.tau_floor", "must be finite and ≥ 0");
        }
        if f.delta_threshold.is_nan() {
            e.push("fdi.delta_threshold", "must not be NaN");
        }

        e.into_result()
    }
}
