//! Fault operators for actuator, pointing, inspection-sensor and
//! communication faults.
//!
//! Every operator is the identity before the fault's onset time and for a
//! zero magnitude. Each [`FaultInjector`] owns its own noise stream, so
//! faults on different agents never share draws.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Sigma};
use crate::orbit::RelativeState;
use crate::rng::{self, StreamRng};
use crate::{AgentId, Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultKind {
    /// Acceleration noise on the translational state; magnitude in m/s².
    ActuatorState,
    /// Boresight pointing error; magnitude is the error std in rad.
    ActuatorPointing,
    /// Multiplicative inflation of every finite σ of the agent.
    InspectionSensor,
    /// Additive noise on the transmitted `H_i`; magnitude is the std.
    SpuriousComm,
}

impl FaultKind {
    pub const ALL: [FaultKind; 4] = [
        FaultKind::ActuatorState,
        FaultKind::ActuatorPointing,
        FaultKind::InspectionSensor,
        FaultKind::SpuriousComm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::ActuatorState => "actuator-state",
            FaultKind::ActuatorPointing => "actuator-pointing",
            FaultKind::InspectionSensor => "inspection-sensor",
            FaultKind::SpuriousComm => "spurious-comm",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub target_agent: AgentId,
    pub kind: FaultKind,
    #[serde(default)]
    pub onset_time: f64,
    pub magnitude: f64,
    /// Explicit stream seed. When absent the seed is derived from the
    /// scenario master seed, the target agent and the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

impl FaultSpec {
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.onset_time && self.magnitude > 0.0
    }

    /// Stream seed; `occurrence` counts earlier specs with the same
    /// (agent, kind) pair so duplicates still get distinct streams.
    pub fn resolved_seed(&self, master_seed: u64, occurrence: u64) -> u64 {
        self.rng_seed.unwrap_or_else(|| {
            rng::derive_seed(
                master_seed,
                &[
                    rng::TAG_FAULT,
                    u64::from(self.target_agent),
                    self.kind.index(),
                    occurrence,
                ],
            )
        })
    }
}

/// A fault spec together with its private noise stream.
#[derive(Debug, Clone)]
pub struct FaultInjector {
    spec: FaultSpec,
    rng: StreamRng,
}

impl FaultInjector {
    pub fn new(spec: FaultSpec, seed: u64) -> Self {
        Self {
            spec,
            rng: rng::stream(seed),
        }
    }

    pub fn spec(&self) -> &FaultSpec {
        &self.spec
    }

    fn expect(&self, kind: FaultKind) -> Result<()> {
        if self.spec.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongFaultKind {
                expected: kind,
                actual: self.spec.kind,
            })
        }
    }

    fn gaussian(&mut self, std: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        z * std
    }

    /// Velocity kick `Δv ~ N(0, (magnitude·dt)²)` per axis, applied before
    /// the state is propagated over a step of length `dt`.
    pub fn apply_state(&mut self, t: f64, dt: f64, state: &RelativeState) -> Result<RelativeState> {
        self.expect(FaultKind::ActuatorState)?;
        if !self.spec.is_active(t) {
            return Ok(*state);
        }
        let std = self.spec.magnitude * dt;
        let kick = Vec3::new(self.gaussian(std), self.gaussian(std), self.gaussian(std));
        Ok(RelativeState {
            position: state.position,
            velocity: state.velocity + kick,
        })
    }

    /// Tilts the boresight by `|N(0, magnitude²)|` rad about a uniformly
    /// random axis perpendicular to it.
    pub fn apply_pointing(&mut self, t: f64, pose: &Pose) -> Result<Pose> {
        self.expect(FaultKind::ActuatorPointing)?;
        if !self.spec.is_active(t) {
            return Ok(*pose);
        }
        let angle = self.gaussian(self.spec.magnitude).abs();
        let azimuth = self.rng.random::<f64>() * TAU;
        let b = pose.boresight();
        let (e1, e2) = orthonormal_basis(&b);
        let axis = e1 * azimuth.cos() + e2 * azimuth.sin();
        let tilted = b * angle.cos() + axis.cross(&b) * angle.sin();
        Ok(Pose::new(pose.position, tilted).expect("rotation of a unit vector is non-zero"))
    }

    pub fn apply_sensor_variance(&self, t: f64, sigma: Sigma) -> Result<Sigma> {
        self.expect(FaultKind::InspectionSensor)?;
        if !self.spec.is_active(t) {
            return Ok(sigma);
        }
        Ok(sigma.scaled(self.spec.magnitude))
    }

    /// Corrupts a transmitted `H_i`; the agent's physical behaviour is untouched.
    pub fn apply_comm(&mut self, t: f64, reported: f64) -> Result<f64> {
        self.expect(FaultKind::SpuriousComm)?;
        if !self.spec.is_active(t) {
            return Ok(reported);
        }
        let noise = Normal::new(0.0, self.spec.magnitude)
            .expect("validated magnitude")
            .sample(&mut self.rng);
        Ok(reported + noise)
    }
}

fn orthonormal_basis(b: &Vec3) -> (Vec3, Vec3) {
    let helper = if b.x.abs() <= b.y.abs() && b.x.abs() <= b.z.abs() {
        Vec3::x()
    } else if b.y.abs() <= b.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = b.cross(&helper).normalize();
    let e2 = b.cross(&e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: FaultKind, onset: f64, magnitude: f64) -> FaultSpec {
        FaultSpec {
            target_agent: 0,
            kind,
            onset_time: onset,
            magnitude,
            rng_seed: Some(11),
        }
    }

    fn state() -> RelativeState {
        RelativeState::new(Vec3::new(10.0, -4.0, 2.0), Vec3::new(0.01, -0.02, 0.003))
    }

    fn pose() -> Pose {
        Pose::new(Vec3::new(20.0, 0.0, 0.0), Vec3::new(-1.0, 0.1, 0.0)).unwrap()
    }

    #[test]
    fn identity_before_onset_and_for_zero_magnitude() {
        let mut f = FaultInjector::new(spec(FaultKind::ActuatorState, 100.0, 0.5), 1);
        assert_eq!(f.apply_state(99.9, 3.0, &state()).unwrap(), state());
        let mut f = FaultInjector::new(spec(FaultKind::ActuatorState, 0.0, 0.0), 1);
        assert_eq!(f.apply_state(50.0, 3.0, &state()).unwrap(), state());

        let mut f = FaultInjector::new(spec(FaultKind::ActuatorPointing, 10.0, 0.2), 1);
        assert_eq!(f.apply_pointing(5.0, &pose()).unwrap(), pose());
        let mut f = FaultInjector::new(spec(FaultKind::ActuatorPointing, 0.0, 0.0), 1);
        assert_eq!(f.apply_pointing(5.0, &pose()).unwrap(), pose());

        let f = FaultInjector::new(spec(FaultKind::InspectionSensor, 10.0, 4.0), 1);
        assert_eq!(
            f.apply_sensor_variance(5.0, Sigma::new(100.0)).unwrap(),
            Sigma::new(100.0)
        );

        let mut f = FaultInjector::new(spec(FaultKind::SpuriousComm, 10.0, 1.0), 1);
        assert_eq!(f.apply_comm(5.0, 3.25).unwrap(), 3.25);
        let mut f = FaultInjector::new(spec(FaultKind::SpuriousComm, 0.0, 0.0), 1);
        assert_eq!(f.apply_comm(5.0, 3.25).unwrap(), 3.25);
    }

    #[test]
    fn state_fault_only_touches_velocity_and_reproduces() {
        let run = || {
            let mut f = FaultInjector::new(spec(FaultKind::ActuatorState, 0.0, 0.01), 42);
            let mut s = state();
            let mut out = Vec::new();
            for k in 0..50 {
                s = f.apply_state(k as f64 * 3.0, 3.0, &s).unwrap();
                out.push(s);
            }
            out
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a[0].position, state().position);
        assert_ne!(a[0].velocity, state().velocity);
    }

    #[test]
    fn sensor_variance_examples() {
        let f = FaultInjector::new(spec(FaultKind::InspectionSensor, 0.0, 4.0), 1);
        assert_eq!(
            f.apply_sensor_variance(1.0, Sigma::INVISIBLE).unwrap(),
            Sigma::INVISIBLE
        );
        assert_eq!(
            f.apply_sensor_variance(1.0, Sigma::new(100.0))
                .unwrap()
                .value(),
            400.0
        );
        let f = FaultInjector::new(spec(FaultKind::InspectionSensor, 0.0, 1.0), 1);
        assert_eq!(
            f.apply_sensor_variance(1.0, Sigma::new(100.0))
                .unwrap()
                .value(),
            100.0
        );
    }

    #[test]
    fn comm_fault_stream_is_reproducible() {
        let run = || {
            let mut f = FaultInjector::new(spec(FaultKind::SpuriousComm, 0.0, 2.0), 5);
            (0..20)
                .map(|k| f.apply_comm(k as f64, 10.0).unwrap())
                .collect::<Vec<_>>()
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a.iter().any(|&v| v != 10.0));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let mut f = FaultInjector::new(spec(FaultKind::SpuriousComm, 0.0, 1.0), 1);
        assert!(matches!(
            f.apply_state(0.0, 1.0, &state()),
            Err(Error::WrongFaultKind {
                expected: FaultKind::ActuatorState,
                actual: FaultKind::SpuriousComm
            })
        ));
        assert!(f.apply_pointing(0.0, &pose()).is_err());
        assert!(f.apply_sensor_variance(0.0, Sigma::new(1.0)).is_err());
        let mut g = FaultInjector::new(spec(FaultKind::ActuatorState, 0.0, 1.0), 1);
        assert!(g.apply_comm(0.0, 1.0).is_err());
    }

    #[test]
    fn pointing_error_is_half_normal() {
        // E|N(0, 0.2²)| = 0.2·√(2/π) ≈ 0.1596
        let mut f = FaultInjector::new(spec(FaultKind::ActuatorPointing, 0.0, 0.2), 2024);
        let p = pose();
        let n = 10_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let q = f.apply_pointing(1.0, &p).unwrap();
            assert!((q.boresight().norm() - 1.0).abs() < 1e-9);
            assert_eq!(q.position, p.position);
            sum += p.boresight().dot(&q.boresight()).clamp(-1.0, 1.0).acos();
        }
        let mean = sum / n as f64;
        assert!((0.12..=0.20).contains(&mean), "mean tilt {mean}");
    }

    #[test]
    fn seeds_differ_by_agent_and_kind() {
        let a = spec(FaultKind::ActuatorState, 0.0, 1.0);
        let mut b = a.clone();
        b.rng_seed = None;
        let mut c = b.clone();
        c.target_agent = 1;
        let mut d = b.clone();
        d.kind = FaultKind::SpuriousComm;
        assert_eq!(a.resolved_seed(3, 0), 11);
        let seeds = [
            b.resolved_seed(3, 0),
            c.resolved_seed(3, 0),
            d.resolved_seed(3, 0),
            b.resolved_seed(3, 1),
        ];
        for i in 0..seeds.len() {
            for j in i + 1..seeds.len() {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
    }
}
