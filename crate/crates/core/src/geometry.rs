//! Sensor poses, POI visibility and the per-view inspection variance.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{AgentId, Error, PoiId, Result, Vec3};

/// Surface tolerance used by the occluder tests, in metres.
pub const SURFACE_TOL: f64 = 1e-6;

/// Variance of one sensor view of one POI. `+∞` means "not visible"; its
/// inverse is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Sigma(f64);

impl Sigma {
    pub const INVISIBLE: Sigma = Sigma(f64::INFINITY);

    /// # Panics
    ///
    /// Panics on NaN or negative values.
    pub fn new(value: f64) -> Self {
        assert!(value >= 0.0, "variance must be non-negative, got {value}");
        Sigma(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_visible(self) -> bool {
        self.0.is_finite()
    }

    pub fn inverse(self) -> f64 {
        if self.0.is_finite() {
            1.0 / self.0
        } else {
            0.0
        }
    }

    /// Multiplies a finite variance by `factor`; `+∞` stays `+∞`.
    pub fn scaled(self, factor: f64) -> Self {
        if self.0.is_finite() {
            Sigma::new(self.0 * factor)
        } else {
            self
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sensor location and pointing direction in the target frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    boresight: Vec3,
}

impl Pose {
    /// Normalizes `boresight`; `None` if it has zero or non-finite length.
    pub fn new(position: Vec3, boresight: Vec3) -> Option<Self> {
        let norm = boresight.norm();
        (norm.is_finite() && norm > 0.0).then(|| Self {
            position,
            boresight: boresight / norm,
        })
    }

    pub fn boresight(&self) -> Vec3 {
        self.boresight
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// Half-angle of the circular field of view, rad.
    pub half_angle_fov: f64,
    /// Maximum useful range, m.
    pub max_range: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            half_angle_fov: 15f64.to_radians(),
            max_range: 1.0e5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiModel {
    pub id: PoiId,
    #[serde(with = "crate::io::vec3")]
    pub position: Vec3,
    #[serde(with = "crate::io::vec3")]
    pub normal: Vec3,
    /// Relative importance φ ≥ 0.
    #[serde(default = "one")]
    pub importance: f64,
    /// Prior variance w > 0.
    pub prior_variance: f64,
}

fn one() -> f64 {
    1.0
}

/// Convex occluder centred at the frame origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TargetBody {
    Sphere {
        radius: f64,
    },
    Box {
        #[serde(with = "crate::io::vec3")]
        half_extents: Vec3,
    },
}

impl TargetBody {
    /// True if `point` lies on or outside the surface (within [`SURFACE_TOL`]).
    pub fn is_outside_or_on(&self, point: &Vec3) -> bool {
        match *self {
            TargetBody::Sphere { radius } => point.norm() >= radius - SURFACE_TOL,
            TargetBody::Box { half_extents } => {
                (0..3).any(|k| point[k].abs() >= half_extents[k] - SURFACE_TOL)
            }
        }
    }

    /// True if the segment `a → b` passes through the open interior of the
    /// occluder shrunk by [`SURFACE_TOL`]. Grazing contact and endpoints on
    /// the surface do not count.
    pub fn segment_hits_interior(&self, a: &Vec3, b: &Vec3) -> bool {
        let d = b - a;
        match *self {
            TargetBody::Sphere { radius } => {
                let r = radius - SURFACE_TOL;
                if r <= 0.0 {
                    return false;
                }
                let dd = d.norm_squared();
                let t = if dd > 0.0 {
                    (-a.dot(&d) / dd).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (a + d * t).norm_squared() < r * r
            }
            TargetBody::Box { half_extents } => {
                let mut t_enter = 0.0_f64;
                let mut t_exit = 1.0_f64;
                for k in 0..3 {
                    let h = half_extents[k] - SURFACE_TOL;
                    if h <= 0.0 {
                        return false;
                    }
                    if d[k] == 0.0 {
                        if a[k] <= -h || a[k] >= h {
                            return false;
                        }
                    } else {
                        let t0 = (-h - a[k]) / d[k];
                        let t1 = (h - a[k]) / d[k];
                        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
                        t_enter = t_enter.max(lo);
                        t_exit = t_exit.min(hi);
                        if t_enter >= t_exit {
                            return false;
                        }
                    }
                }
                t_enter < t_exit
            }
        }
    }
}

/// One inspection reading `z = h(p, s) + ξ`, `ξ ~ N(0, σ(p, s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InspectionMeasurement {
    pub observer_id: AgentId,
    pub poi_id: PoiId,
    pub value: f64,
    pub noise_variance: f64,
}

impl InspectionMeasurement {
    /// Draws a reading of `truth` under view variance `sigma`, or `None` if
    /// the POI is not visible.
    pub fn sample<R: Rng + ?Sized>(
        observer_id: AgentId,
        poi_id: PoiId,
        truth: f64,
        sigma: Sigma,
        rng: &mut R,
    ) -> Option<Self> {
        if !sigma.is_visible() {
            return None;
        }
        let noise = Normal::new(0.0, sigma.value().sqrt()).ok()?;
        Some(Self {
            observer_id,
            poi_id,
            value: truth + noise.sample(rng),
            noise_variance: sigma.value(),
        })
    }
}

/// Range, facing and occlusion tests: everything in [`visible`] except the
/// field-of-view cone. This is the set of POIs a sensor at `position` could
/// see if it pointed at them.
pub fn observable(
    position: &Vec3,
    camera: &CameraModel,
    poi: &PoiModel,
    body: &TargetBody,
) -> bool {
    let to_poi = poi.position - position;
    let dist = to_poi.norm();
    dist > 0.0
        && dist <= camera.max_range
        && poi.normal.dot(&(position - poi.position)) > 0.0
        && !body.segment_hits_interior(position, &poi.position)
}

pub fn visible(pose: &Pose, camera: &CameraModel, poi: &PoiModel, body: &TargetBody) -> bool {
    let to_poi = poi.position - pose.position;
    let dist = to_poi.norm();
    dist > 0.0
        && pose.boresight.dot(&to_poi) >= dist * camera.half_angle_fov.cos()
        && observable(&pose.position, camera, poi, body)
}

/// `dist²(p, s)` when visible, `+∞` otherwise (unit proportionality constant).
pub fn sigma(pose: &Pose, camera: &CameraModel, poi: &PoiModel, body: &TargetBody) -> Sigma {
    if visible(pose, camera, poi, body) {
        Sigma::new((poi.position - pose.position).norm_squared())
    } else {
        Sigma::INVISIBLE
    }
}

pub fn visible_set(
    pose: &Pose,
    camera: &CameraModel,
    pois: &[PoiModel],
    body: &TargetBody,
) -> BTreeSet<PoiId> {
    pois.iter()
        .filter(|poi| visible(pose, camera, poi, body))
        .map(|poi| poi.id)
        .collect()
}

/// Pose at `position` with its boresight aimed at `aim`.
pub fn point_at(position: Vec3, aim: Vec3) -> Result<Pose> {
    Pose::new(position, aim - position).ok_or(Error::DegeneratePointing)
}
