//! Relative orbital motion about the target in the LVLH frame.
//!
//! Axes are radial (`x`), along-track (`y`) and cross-track (`z`). Motion is
//! modelled with the Clohessy–Wiltshire equations for a circular reference
//! orbit of mean motion `n`:
//!
//! ```text
//! ẍ = 3n²x + 2nẏ + u_x
//! ÿ = −2nẋ + u_y
//! z̈ = −n²z + u_z
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Circular reference orbit of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitEnvironment {
    mean_motion: f64,
    period: f64,
}

impl OrbitEnvironment {
    /// Returns `None` unless `mean_motion` is finite and strictly positive.
    pub fn new(mean_motion: f64) -> Option<Self> {
        (mean_motion.is_finite() && mean_motion > 0.0).then(|| Self {
            mean_motion,
            period: TAU / mean_motion,
        })
    }

    /// Mean motion `n` in rad/s.
    pub fn mean_motion(&self) -> f64 {
        self.mean_motion
    }

    /// Orbit period `2π/n` in seconds.
    pub fn period(&self) -> f64 {
        self.period
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    pub position: Vec3,
    pub velocity: Vec3,
}

impl RelativeState {
    pub fn new(position: Vec3, velocity: Vec3) -> Self {
        Self { position, velocity }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.position
            .iter()
            .chain(self.velocity.iter())
            .all(|v| v.is_finite())
    }
}

/// Time derivative of a [`RelativeState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    pub acceleration: Vec3,
}

impl ControlInput {
    pub fn zero() -> Self {
        Self {
            acceleration: Vec3::zeros(),
        }
    }
}

/// Drift-free (2:1 in-plane) relative orbit around the target.
///
/// The in-plane motion is an ellipse centred at `(0, along_track_offset)`
/// with radial semi-axis `radial_amplitude` and along-track semi-axis twice
/// that; the cross-track motion is an independent harmonic oscillation.
/// Initial velocities follow from the closed form and are never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProParameters {
    pub radial_amplitude: f64,
    #[serde(default)]
    pub along_track_offset: f64,
    pub cross_track_amplitude: f64,
    #[serde(default)]
    pub phase_radial: f64,
    #[serde(default)]
    pub phase_cross: f64,
}

/// Clohessy–Wiltshire right-hand side.
pub fn cw_derivative(
    state: &RelativeState,
    u: &ControlInput,
    env: &OrbitEnvironment,
) -> StateDerivative {
    let n = env.mean_motion;
    let p = &state.position;
    let v = &state.velocity;
    let a = &u.acceleration;
    StateDerivative {
        velocity: *v,
        acceleration: Vec3::new(
            3.0 * n * n * p.x + 2.0 * n * v.y + a.x,
            -2.0 * n * v.x + a.y,
            -n * n * p.z + a.z,
        ),
    }
}

fn offset(state: &RelativeState, d: &StateDerivative, h: f64) -> RelativeState {
    RelativeState {
        position: state.position + d.velocity * h,
        velocity: state.velocity + d.acceleration * h,
    }
}

/// One classical fourth-order Runge–Kutta step of length `dt` with the
/// control held constant over the step.
pub fn propagate(
    state: &RelativeState,
    u: &ControlInput,
    env: &OrbitEnvironment,
    dt: f64,
) -> Result<RelativeState> {
    let k1 = cw_derivative(state, u, env);
    let k2 = cw_derivative(&offset(state, &k1, 0.5 * dt), u, env);
    let k3 = cw_derivative(&offset(state, &k2, 0.5 * dt), u, env);
    let k4 = cw_derivative(&offset(state, &k3, dt), u, env);

    let h6 = dt / 6.0;
    let next = RelativeState {
        position: state.position
            + (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity) * h6,
        velocity: state.velocity
            + (k1.acceleration + 2.0 * k2.acceleration + 2.0 * k3.acceleration + k4.acceleration)
                * h6,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::PropagationDiverged)
    }
}

/// Closed-form state on a drift-free relative orbit at time `t`.
///
/// The phase is reduced modulo the orbit period first, so `t = 0` and
/// `t = period` produce bit-identical states.
pub fn pro_state(params: &ProParameters, env: &OrbitEnvironment, t: f64) -> RelativeState {
    let n = env.mean_motion;
    let theta = n * t.rem_euclid(env.period);
    let (sr, cr) = (theta + params.phase_radial).sin_cos();
    let (sc, cc) = (theta + params.phase_cross).sin_cos();
    let ar = params.radial_amplitude;
    let ac = params.cross_track_amplitude;
    RelativeState {
        position: Vec3::new(ar * sr, params.along_track_offset + 2.0 * ar * cr, ac * sc),
        velocity: Vec3::new(ar * n * cr, -2.0 * ar * n * sr, ac * n * cc),
    }
}
