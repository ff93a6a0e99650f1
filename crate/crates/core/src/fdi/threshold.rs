//! Adaptive per-agent thresholds from ε-neighborhood pointing samples.
//!
//! The sensor is re-aimed at random points near the agent's nominal target
//! POI; each perturbed aim yields a candidate visible set `S'`. A candidate
//! is kept when its cost deviates from the prediction by a non-zero amount
//! no larger than the observed deviation, and
//! `τ = min_S' |1 − (H_i(S') − h_prev)/(H_i(S^pred) − h_prev)|`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fdi::metric::is_degenerate;
use crate::geometry::{point_at, sigma, CameraModel, PoiModel, Sigma, TargetBody};
use crate::info_cost::{agent_contribution, PsiTable};
use crate::{AgentId, Error, PoiId, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub agent: AgentId,
    pub t: f64,
    pub tau: f64,
    pub sample_count: usize,
    /// Candidates that passed the deviation band.
    pub candidates_kept: usize,
    pub epsilon: f64,
    /// True when no candidate was usable and `tau` is the configured floor.
    pub fallback: bool,
}

/// One perturbed pointing: the aim point and the finite σ it produces, in
/// POI id order.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub aim: Vec3,
    pub visible: Vec<(PoiId, Sigma)>,
}

impl CandidateSet {
    pub fn ids(&self) -> Vec<PoiId> {
        self.visible.iter().map(|&(id, _)| id).collect()
    }

    /// `Σ_{s∈S'} φψσ⁻¹` under `psi`.
    pub fn cost(&self, pois: &BTreeMap<PoiId, &PoiModel>, psi: &PsiTable) -> f64 {
        agent_contribution(self.visible.iter().map(|&(id, s)| (pois[&id], s)), psi)
    }
}

/// Sensor geometry shared by every candidate of one agent at one tick.
#[derive(Debug, Clone, Copy)]
pub struct SamplingContext<'a> {
    pub observer_position: Vec3,
    pub camera: &'a CameraModel,
    pub pois: &'a [PoiModel],
    pub body: &'a TargetBody,
    pub sigma_scale: f64,
}

/// Finite σ entries seen when aiming at `aim`.
pub fn visible_entries_for_aim(
    ctx: &SamplingContext<'_>,
    aim: Vec3,
) -> Result<Vec<(PoiId, Sigma)>> {
    let pose = point_at(ctx.observer_position, aim)?;
    Ok(ctx
        .pois
        .iter()
        .map(|poi| {
            (
                poi.id,
                sigma(&pose, ctx.camera, poi, ctx.body).scaled(ctx.sigma_scale),
            )
        })
        .filter(|(_, s)| s.is_visible())
        .collect())
}

/// Point uniformly distributed on the disk of radius `epsilon` tangent to
/// the target surface at `poi`.
pub fn perturbed_aim<R: Rng + ?Sized>(poi: &PoiModel, epsilon: f64, rng: &mut R) -> Vec3 {
    if epsilon == 0.0 {
        return poi.position;
    }
    let n = poi.normal;
    let helper = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let r = epsilon * rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    poi.position + (e1 * theta.cos() + e2 * theta.sin()) * r
}

/// Draws `n_samples` candidate sets around `target`.
pub fn sample_candidate_sets<R: Rng + ?Sized>(
    agent: AgentId,
    t: f64,
    target: Option<&PoiModel>,
    ctx: &SamplingContext<'_>,
    epsilon: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<CandidateSet>> {
    let target = target.ok_or(Error::EmptyCandidates { agent, t })?;
    (0..n_samples)
        .map(|_| {
            let aim = perturbed_aim(target, epsilon, rng);
            Ok(CandidateSet {
                aim,
                visible: visible_entries_for_aim(ctx, aim)?,
            })
        })
        .collect()
}

/// Per-candidate τ, `None` for candidates outside the deviation band
/// `0 < |H(S') − h_pred| ≤ |h_now − h_pred|` or when the denominator is
/// degenerate.
pub fn candidate_taus(
    candidate_costs: &[f64],
    h_pred: f64,
    h_prev: f64,
    h_now: f64,
) -> Vec<Option<f64>> {
    let degenerate = is_degenerate(h_pred, h_prev);
    let observed = (h_now - h_pred).abs();
    candidate_costs
        .iter()
        .map(|&c| {
            let dev = (c - h_pred).abs();
            (!degenerate && dev > 0.0 && dev <= observed)
                .then(|| (1.0 - (c - h_prev) / (h_pred - h_prev)).abs())
        })
        .collect()
}

/// Minimum τ over the usable candidates.
pub fn compute_threshold(
    agent: AgentId,
    t: f64,
    candidate_costs: &[f64],
    h_pred: f64,
    h_prev: f64,
    h_now: f64,
    epsilon: f64,
) -> Result<ThresholdRecord> {
    if candidate_costs.is_empty() {
        return Err(Error::EmptyCandidates { agent, t });
    }
    let taus = candidate_taus(candidate_costs, h_pred, h_prev, h_now);
    let kept: Vec<f64> = taus.into_iter().flatten().collect();
    let tau = kept
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
        .ok_or(Error::ThresholdUnavailable { agent, t })?;
    Ok(ThresholdRecord {
        agent,
        t,
        tau,
        sample_count: candidate_costs.len(),
        candidates_kept: kept.len(),
        epsilon,
        fallback: false,
    })
}

/// Floor threshold used when no candidate is usable.
pub fn fallback_threshold(
    agent: AgentId,
    t: f64,
    tau_floor: f64,
    sample_count: usize,
    epsilon: f64,
) -> ThresholdRecord {
    ThresholdRecord {
        agent,
        t,
        tau: tau_floor,
        sample_count,
        candidates_kept: 0,
        epsilon,
        fallback: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn minimum_over_kept_candidates() {
        // h_prev = 1, h_pred = 2: τ(c) = |1 − (c − 1)| = |2 − c|
        let r = compute_threshold(0, 0.0, &[2.3, 2.1, 1.8], 2.0, 1.0, 3.0, 1.0).unwrap();
        assert!((r.tau - 0.1).abs() < 1e-12);
        assert_eq!(r.sample_count, 3);
        assert_eq!(r.candidates_kept, 3);
        assert!(!r.fallback);
    }

    #[test]
    fn candidate_identical_to_prediction_is_excluded() {
        assert!(matches!(
            compute_threshold(4, 60.0, &[2.0], 2.0, 1.0, 3.0, 1.0),
            Err(Error::ThresholdUnavailable { agent: 4, .. })
        ));
    }

    #[test]
    fn candidates_beyond_observed_deviation_are_excluded() {
        let taus = candidate_taus(&[2.5, 2.05, 1.0], 2.0, 1.0, 2.1);
        assert_eq!(taus[0], None);
        assert!(taus[1].is_some());
        assert_eq!(taus[2], None);
    }

    #[test]
    fn degenerate_denominator_gives_no_threshold() {
        assert!(compute_threshold(0, 0.0, &[1.5], 1.0, 1.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn zero_epsilon_aims_exactly_at_the_poi() {
        let poi = PoiModel {
            id: 3,
            position: Vec3::new(5.0, 0.0, 0.0),
            normal: Vec3::x(),
            importance: 1.0,
            prior_variance: 1.0,
        };
        let mut r = rng::stream(1);
        assert_eq!(perturbed_aim(&poi, 0.0, &mut r), poi.position);
        for _ in 0..200 {
            let a = perturbed_aim(&poi, 0.5, &mut r);
            let d = a - poi.position;
            assert!(d.norm() <= 0.5 + 1e-12);
            assert!(d.dot(&poi.normal).abs() < 1e-12);
        }
    }
}
