//! Deterministic multi-spacecraft inspection simulator with a centralized,
//! task-aware fault detection and identification (FDI) monitor.
//!
//! Observer spacecraft fly passive relative orbits around a target and point
//! a camera at points of interest (POIs). The global inspection cost `H` is
//! split into per-agent contributions `H_i`; the monitor compares each
//! agent's achieved cost progress against a fault-free replica of the same
//! pipeline and flags agents whose progress departs from the prediction by
//! more than an adaptive, per-tick threshold.
//!
//! Module map:
//!
//! - [`orbit`]: Clohessy–Wiltshire relative dynamics, RK4 propagation and
//!   closed-form drift-free relative orbits.
//! - [`geometry`]: sensor poses, POI visibility and the per-view variance σ.
//! - [`info_cost`]: the information cost, its per-POI form and the
//!   decomposition into prior term plus per-agent contributions.
//! - [`faults`]: actuator, pointing, inspection-sensor and communication
//!   fault operators with seeded noise streams.
//! - [`fdi`]: nominal prediction, fault metric, performance classification,
//!   ε-neighborhood thresholds and the integral detector.
//! - [`sim`]: scenario configuration, the closed-loop tick engine and the
//!   telemetry log.
//! - [`io`]: scenario files, CSV telemetry, plot data and run manifests.

pub mod error;
pub mod faults;
pub mod fdi;
pub mod geometry;
pub mod info_cost;
pub mod io;
pub mod orbit;
pub mod rng;
pub mod sim;

pub use error::{Error, FieldError, Result, ValidationErrors};

/// Observer spacecraft identifier.
pub type AgentId = u32;

/// Point-of-interest identifier.
pub type PoiId = u32;

pub type Vec3 = nalgebra::Vector3<f64>;
