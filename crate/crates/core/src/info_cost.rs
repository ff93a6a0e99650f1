//! Global information cost and its per-agent decomposition.
//!
//! For a POI `s` with prior variance `w` observed from poses `p`,
//!
//! ```text
//! H_POI(s) = (w⁻¹ + Σ_p σ(p,s)⁻¹)⁻¹          H = Σ_s φ(s) H_POI(s)
//! ψ(s)     = (w⁻¹ + Σ_p σ(p,s)⁻¹)⁻²
//! H        = Σ_s φψw⁻¹  +  Σ_i Σ_{s∈S_i} φψσ(p_i,s)⁻¹
//!            └ prior ┘      └────────── H_i ─────────┘
//! ```
//!
//! `S_i` is the set of POIs agent `i` currently sees; agents' sets may
//! overlap. ψ is refreshed at fusion instants and held in between, so the
//! identity is exact only when ψ is fresh.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{sigma, CameraModel, PoiModel, Pose, Sigma, TargetBody};
use crate::{AgentId, Error, PoiId, Result};

/// σ for every (observer, POI) pair at one instant. Only finite entries are
/// stored; a missing entry means "not visible".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SigmaTable {
    pub timestamp: f64,
    poses: BTreeMap<AgentId, Pose>,
    entries: BTreeMap<(AgentId, PoiId), Sigma>,
}

impl SigmaTable {
    pub fn new(timestamp: f64) -> Self {
        Self {
            timestamp,
            ..Self::default()
        }
    }

    /// Builds the table by evaluating σ for every observer/POI pair, with the
    /// variance constant `sigma_scale` applied to finite entries.
    pub fn from_poses<'a>(
        timestamp: f64,
        observers: impl IntoIterator<Item = (AgentId, &'a Pose, &'a CameraModel)>,
        pois: &[PoiModel],
        body: &TargetBody,
        sigma_scale: f64,
    ) -> Self {
        let mut table = Self::new(timestamp);
        for (agent, pose, camera) in observers {
            table.add_observer(agent, *pose);
            for poi in pois {
                table.set(
                    agent,
                    poi.id,
                    sigma(pose, camera, poi, body).scaled(sigma_scale),
                );
            }
        }
        table
    }

    pub fn add_observer(&mut self, agent: AgentId, pose: Pose) {
        self.poses.insert(agent, pose);
    }

    /// Records σ for a pair; `+∞` removes any previous entry.
    pub fn set(&mut self, agent: AgentId, poi: PoiId, value: Sigma) {
        if value.is_visible() {
            debug_assert!(value.value() > 0.0, "finite σ must be positive");
            self.entries.insert((agent, poi), value);
        } else {
            self.entries.remove(&(agent, poi));
        }
    }

    pub fn get(&self, agent: AgentId, poi: PoiId) -> Sigma {
        self.entries
            .get(&(agent, poi))
            .copied()
            .unwrap_or(Sigma::INVISIBLE)
    }

    pub fn pose(&self, agent: AgentId) -> Option<&Pose> {
        self.poses.get(&agent)
    }

    pub fn has_observer(&self, agent: AgentId) -> bool {
        self.poses.contains_key(&agent)
    }

    /// Observer ids in ascending order.
    pub fn observers(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.poses.keys().copied()
    }

    /// σ of `poi` from every observer, in ascending observer order.
    pub fn sigmas_for(&self, poi: PoiId) -> Vec<Sigma> {
        self.observers().map(|a| self.get(a, poi)).collect()
    }

    /// Finite entries of one observer, in ascending POI order.
    pub fn visible_entries(&self, agent: AgentId) -> impl Iterator<Item = (PoiId, Sigma)> + '_ {
        self.entries
            .range((agent, PoiId::MIN)..=(agent, PoiId::MAX))
            .map(|(&(_, poi), &s)| (poi, s))
    }
}

/// ψ(s) per POI, as last published by a fusion step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PsiTable(pub BTreeMap<PoiId, f64>);

impl PsiTable {
    pub fn get(&self, poi: PoiId) -> Option<f64> {
        self.0.get(&poi).copied()
    }

    /// ψ of a fully unobserved POI set (`ψ = w²`).
    pub fn prior(pois: &[PoiModel]) -> Self {
        PsiTable(pois.iter().map(|p| (p.id, psi(p, &[]))).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub timestamp: f64,
    /// `Σ_s φ(s) H_POI(s)`, evaluated directly.
    pub total_h: f64,
    /// `Σ_s φψw⁻¹`.
    pub prior_term: f64,
    pub agent_terms: BTreeMap<AgentId, f64>,
    pub psi: PsiTable,
    /// Fused variance `H_POI(s)` per POI.
    pub poi_variance: BTreeMap<PoiId, f64>,
}

impl CostBreakdown {
    pub fn decomposed_total(&self) -> f64 {
        self.prior_term + self.agent_terms.values().sum::<f64>()
    }

    /// `|total_h − (prior_term + Σ H_i)|`.
    pub fn identity_residual(&self) -> f64 {
        (self.total_h - self.decomposed_total()).abs()
    }
}

/// Fusion and FDI cadences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionSchedule {
    /// Fusion / consensus update rate, Hz.
    pub omega_g: f64,
    /// FDI evaluation rate, Hz.
    pub omega_fdi: f64,
}

impl Default for FusionSchedule {
    fn default() -> Self {
        Self {
            omega_g: 1.0 / 60.0,
            omega_fdi: 1.0 / 60.0,
        }
    }
}

impl FusionSchedule {
    pub fn is_valid(&self) -> bool {
        self.omega_fdi > 0.0 && self.omega_g >= self.omega_fdi && self.omega_g.is_finite()
    }
}

fn information(poi: &PoiModel, sigmas: &[Sigma]) -> f64 {
    sigmas
        .iter()
        .fold(1.0 / poi.prior_variance, |acc, s| acc + s.inverse())
}

/// `(w⁻¹ + Σ σ⁻¹)⁻¹`; invisible views contribute nothing.
pub fn h_poi(poi: &PoiModel, sigmas: &[Sigma]) -> f64 {
    1.0 / information(poi, sigmas)
}

/// `(w⁻¹ + Σ σ⁻¹)⁻²`, i.e. `h_poi²`.
pub fn psi(poi: &PoiModel, sigmas: &[Sigma]) -> f64 {
    let h = h_poi(poi, sigmas);
    h * h
}

/// `Σ_s φ(s) H_POI(s)` over every observer in `table`.
pub fn total_cost(pois: &[PoiModel], table: &SigmaTable) -> f64 {
    pois.iter()
        .map(|poi| poi.importance * h_poi(poi, &table.sigmas_for(poi.id)))
        .fold(0.0, |acc, x| acc + x)
}

fn term(poi: &PoiModel, psi: f64, s: Sigma) -> f64 {
    poi.importance * psi * s.inverse()
}

/// `Σ φ(s) ψ(s) σ(s)⁻¹` over the given (POI, σ) pairs, in iteration order.
///
/// POIs missing from `psi` fall back to the prior `ψ = w²`.
pub fn agent_contribution<'a>(
    entries: impl IntoIterator<Item = (&'a PoiModel, Sigma)>,
    psi_table: &PsiTable,
) -> f64 {
    entries
        .into_iter()
        .map(|(poi, s)| {
            let p = psi_table.get(poi.id).unwrap_or_else(|| psi(poi, &[]));
            term(poi, p, s)
        })
        .fold(0.0, |acc, x| acc + x)
}

/// Splits the cost into the prior term and one contribution per observer in
/// `observers`, with ψ evaluated fresh from `table`.
pub fn decompose(pois: &[PoiModel], table: &SigmaTable, observers: &[AgentId]) -> CostBreakdown {
    let mut agent_terms: BTreeMap<AgentId, f64> = observers.iter().map(|&a| (a, 0.0)).collect();
    let mut psi_map = BTreeMap::new();
    let mut poi_variance = BTreeMap::new();
    let mut prior_term = 0.0;
    let mut total_h = 0.0;

    for poi in pois {
        let sigmas: Vec<Sigma> = observers.iter().map(|&a| table.get(a, poi.id)).collect();
        let h = h_poi(poi, &sigmas);
        let p = h * h;
        total_h += poi.importance * h;
        prior_term += poi.importance * p / poi.prior_variance;
        for (&agent, s) in observers.iter().zip(&sigmas) {
            if s.is_visible() {
                *agent_terms.get_mut(&agent).expect("observer registered") += term(poi, p, *s);
            }
        }
        psi_map.insert(poi.id, p);
        poi_variance.insert(poi.id, h);
    }

    CostBreakdown {
        timestamp: table.timestamp,
        total_h,
        prior_term,
        agent_terms,
        psi: PsiTable(psi_map),
        poi_variance,
    }
}

/// `H_i` of `observer` with ψ evaluated fresh from every observer in `table`.
pub fn agent_cost(observer: AgentId, pois: &[PoiModel], table: &SigmaTable) -> Result<f64> {
    let observers: Vec<AgentId> = table.observers().collect();
    if !table.has_observer(observer) {
        return Err(Error::UnknownAgent(observer));
    }
    let breakdown = decompose(pois, table, &observers);
    Ok(breakdown.agent_terms[&observer])
}

/// `H_i` of `observer` under a previously published ψ.
pub fn agent_cost_with_psi(
    observer: AgentId,
    pois: &[PoiModel],
    table: &SigmaTable,
    psi_table: &PsiTable,
) -> Result<f64> {
    if !table.has_observer(observer) {
        return Err(Error::UnknownAgent(observer));
    }
    Ok(agent_contribution(
        pois.iter()
            .map(|poi| (poi, table.get(observer, poi.id)))
            .filter(|(_, s)| s.is_visible()),
        psi_table,
    ))
}
