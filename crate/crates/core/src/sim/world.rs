//! Closed-loop tick engine shared by the nominal replica and the live run.

use std::collections::BTreeMap;

use crate::faults::{FaultInjector, FaultKind};
use crate::fdi::{AgentReport, Monitor, NominalPrediction, PredictedAgentTick, PredictedTick};
use crate::geometry::{observable, point_at, sigma, CameraModel, Pose, Sigma};
use crate::info_cost::{
    agent_cost_with_psi, decompose, total_cost, CostBreakdown, PsiTable, SigmaTable,
};
use crate::orbit::{
    pro_state, propagate, ControlInput, OrbitEnvironment, ProParameters, RelativeState,
};
use crate::sim::comm::CommGraph;
use crate::sim::config::ScenarioConfig;
use crate::sim::telemetry::{AgentCostRecord, FdiRecord, GlobalRecord, StateRecord, TelemetryLog};
use crate::{AgentId, Error, PoiId, Result, Vec3};

/// How each agent chooses its aim POI.
#[derive(Debug, Clone, Copy)]
pub enum PointingLaw<'a> {
    /// Observable POI with the largest fused variance; ties go to the
    /// lowest id.
    MaxVariance,
    /// Aim POIs recorded by a nominal replica, re-aimed from the agent's
    /// actual position.
    Planned(&'a NominalPrediction),
}

#[derive(Debug, Clone)]
struct AgentRuntime {
    id: AgentId,
    orbit: ProParameters,
    camera: CameraModel,
    state: RelativeState,
    pose: Pose,
    target: Option<PoiId>,
    reported: f64,
    connected: bool,
    faults: Vec<FaultInjector>,
}

impl AgentRuntime {
    fn injectors(&mut self, kind: FaultKind) -> impl Iterator<Item = &mut FaultInjector> {
        self.faults
            .iter_mut()
            .filter(move |f| f.spec().kind == kind)
    }
}

#[derive(Debug, Clone, Default)]
struct Recorder {
    ticks: Vec<PredictedTick>,
    plan: Vec<Vec<Option<PoiId>>>,
}

/// Mutable simulation state. Build with [`World::nominal`] or
/// [`World::live`], then call [`World::advance`] until [`World::is_done`].
#[derive(Debug)]
pub struct World<'a> {
    cfg: ScenarioConfig,
    env: OrbitEnvironment,
    law: PointingLaw<'a>,
    fusion_every: u64,
    fdi_every: u64,
    steps: u64,
    step: u64,
    t: f64,
    agents: Vec<AgentRuntime>,
    table: SigmaTable,
    psi: PsiTable,
    variance: BTreeMap<PoiId, f64>,
    comm: CommGraph,
    monitor: Option<Monitor>,
    prediction: Option<&'a NominalPrediction>,
    recorder: Option<Recorder>,
    fdi_index: usize,
    log: TelemetryLog,
}

impl<'a> World<'a> {
    /// Fault-free replica with the max-variance pointing law; records the
    /// prediction as it runs.
    pub fn nominal(config: &ScenarioConfig) -> Result<World<'static>> {
        let cfg = config.expanded().without_faults();
        World::build(cfg, PointingLaw::MaxVariance, None, true)
    }

    /// Faulty run monitored against `prediction`.
    pub fn live(config: &ScenarioConfig, prediction: &'a NominalPrediction) -> Result<World<'a>> {
        World::build(
            config.expanded(),
            PointingLaw::Planned(prediction),
            Some(prediction),
            false,
        )
    }

    /// Run with an explicit pointing law and no monitor.
    pub fn unmonitored(config: &ScenarioConfig, law: PointingLaw<'a>) -> Result<World<'a>> {
        World::build(config.expanded(), law, None, false)
    }

    fn build(
        cfg: ScenarioConfig,
        law: PointingLaw<'a>,
        prediction: Option<&'a NominalPrediction>,
        record: bool,
    ) -> Result<World<'a>> {
        cfg.validate()?;
        let env = cfg.environment()?;
        let fusion_every = cfg.fusion_every().expect("validated cadence");
        let fdi_every = cfg.fdi_every().expect("validated cadence");

        let mut occurrences: BTreeMap<(AgentId, FaultKind), u64> = BTreeMap::new();
        let mut injectors: BTreeMap<AgentId, Vec<FaultInjector>> = BTreeMap::new();
        for spec in &cfg.faults {
            let occ = occurrences
                .entry((spec.target_agent, spec.kind))
                .or_insert(0);
            let seed = spec.resolved_seed(cfg.master_seed, *occ);
            *occ += 1;
            injectors
                .entry(spec.target_agent)
                .or_default()
                .push(FaultInjector::new(spec.clone(), seed));
        }

        let agents = cfg
            .agents
            .iter()
            .map(|a| {
                let state = pro_state(&a.orbit, &env, 0.0);
                AgentRuntime {
                    id: a.id,
                    orbit: a.orbit,
                    camera: a.camera,
                    state,
                    pose: Pose::new(state.position, Vec3::x()).expect("unit axis"),
                    target: None,
                    reported: 0.0,
                    connected: true,
                    faults: injectors.remove(&a.id).unwrap_or_default(),
                }
            })
            .collect();

        let monitor = prediction.map(|_| Monitor::new(cfg.fdi_settings()));
        let psi = PsiTable::prior(&cfg.pois);
        let variance = cfg.pois.iter().map(|p| (p.id, p.prior_variance)).collect();
        let mut world = World {
            steps: cfg.step_count(),
            cfg,
            env,
            law,
            fusion_every,
            fdi_every,
            step: 0,
            t: 0.0,
            agents,
            table: SigmaTable::new(0.0),
            psi,
            variance,
            comm: CommGraph::build(0.0, &[], f64::INFINITY, Vec3::zeros()),
            monitor,
            prediction,
            recorder: record.then(Recorder::default),
            fdi_index: 0,
            log: TelemetryLog::default(),
        };
        world.sense()?;
        world.tick_events()?;
        Ok(world)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.steps
    }

    pub fn log(&self) -> &TelemetryLog {
        &self.log
    }

    pub fn into_log(self) -> TelemetryLog {
        self.log
    }

    pub fn comm_graph(&self) -> &CommGraph {
        &self.comm
    }

    pub fn sigma_table(&self) -> &SigmaTable {
        &self.table
    }

    pub fn agent_state(&self, agent: AgentId) -> Option<RelativeState> {
        self.agents.iter().find(|a| a.id == agent).map(|a| a.state)
    }

    pub fn agent_pose(&self, agent: AgentId) -> Option<Pose> {
        self.agents.iter().find(|a| a.id == agent).map(|a| a.pose)
    }

    /// Nominal PRO position of `agent` at the current time.
    pub fn nominal_state(&self, agent: AgentId) -> Option<RelativeState> {
        self.agents
            .iter()
            .find(|a| a.id == agent)
            .map(|a| pro_state(&a.orbit, &self.env, self.t))
    }

    /// The recorded prediction, for a world built with [`World::nominal`].
    pub fn into_prediction(self) -> Option<(NominalPrediction, TelemetryLog)> {
        let horizon_end = self.t;
        let agent_ids = self.agents.iter().map(|a| a.id).collect();
        self.recorder.map(|r| {
            (
                NominalPrediction {
                    horizon_start: 0.0,
                    horizon_end,
                    agent_ids,
                    ticks: r.ticks,
                    pointing_plan: r.plan,
                },
                self.log,
            )
        })
    }

    /// One simulation step followed by whatever fusion/FDI work is due.
    pub fn advance(&mut self) -> Result<()> {
        self.step()?;
        self.tick_events()
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.is_done() {
            self.advance()?;
        }
        Ok(())
    }

    /// Propagates every agent by one `sim_dt` (state faults first), then
    /// re-points sensors and rebuilds the σ table.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.sim_dt;
        let t_prev = self.t;
        for agent in &mut self.agents {
            let mut state = agent.state;
            for f in agent.injectors(FaultKind::ActuatorState) {
                state = f.apply_state(t_prev, dt, &state)?;
            }
            agent.state = propagate(&state, &ControlInput::zero(), &self.env, dt)?;
        }
        self.step += 1;
        self.t = self.step as f64 * dt;
        self.sense()
    }

    fn choose_target(&self, index: usize) -> Option<PoiId> {
        match self.law {
            PointingLaw::Planned(p) => p.planned_target(self.step as usize, index),
            PointingLaw::MaxVariance => {
                let agent = &self.agents[index];
                let mut best: Option<(PoiId, f64)> = None;
                for poi in &self.cfg.pois {
                    if !observable(&agent.state.position, &agent.camera, poi, &self.cfg.target) {
                        continue;
                    }
                    let v = self.variance[&poi.id];
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((poi.id, v));
                    }
                }
                best.map(|(id, _)| id)
            }
        }
    }

    fn sense(&mut self) -> Result<()> {
        let positions: BTreeMap<PoiId, Vec3> =
            self.cfg.pois.iter().map(|p| (p.id, p.position)).collect();
        let targets: Vec<Option<PoiId>> = (0..self.agents.len())
            .map(|k| self.choose_target(k))
            .collect();
        if let Some(r) = &mut self.recorder {
            r.plan.push(targets.clone());
        }

        let mut table = SigmaTable::new(self.t);
        for (agent, target) in self.agents.iter_mut().zip(targets) {
            let aim = target
                .and_then(|id| positions.get(&id).copied())
                .unwrap_or_else(Vec3::zeros);
            let mut pose = point_at(agent.state.position, aim)?;
            for f in agent.injectors(FaultKind::ActuatorPointing) {
                pose = f.apply_pointing(self.t, &pose)?;
            }
            agent.pose = pose;
            agent.target = target;
            table.add_observer(agent.id, pose);
            for poi in &self.cfg.pois {
                let mut s =
                    sigma(&pose, &agent.camera, poi, &self.cfg.target).scaled(self.cfg.sigma_scale);
                for f in agent.injectors(FaultKind::InspectionSensor) {
                    s = f.apply_sensor_variance(self.t, s)?;
                }
                table.set(agent.id, poi.id, s);
            }
        }
        self.table = table;

        let positions: Vec<(AgentId, Vec3)> = self
            .agents
            .iter()
            .map(|a| (a.id, a.state.position))
            .collect();
        self.comm = CommGraph::build(
            self.t,
            &positions,
            self.cfg.comm_radius,
            self.cfg.monitor_position,
        );
        for (agent, c) in self.agents.iter_mut().zip(self.comm.connected_to_monitor()) {
            agent.connected = c;
        }
        Ok(())
    }

    fn tick_events(&mut self) -> Result<()> {
        let fusion = self.step.is_multiple_of(self.fusion_every);
        let fdi = self.step.is_multiple_of(self.fdi_every);
        let breakdown = if fusion {
            Some(self.fusion_step())
        } else {
            None
        };
        if fusion || fdi {
            self.report_step(breakdown.as_ref())?;
        }
        if fdi {
            self.fdi_step()?;
        }
        self.log_states();
        Ok(())
    }

    /// Fresh decomposition of the full σ table; refreshes ψ and the POI
    /// variances that drive the pointing law.
    pub fn fusion_step(&mut self) -> CostBreakdown {
        let ids: Vec<AgentId> = self.agents.iter().map(|a| a.id).collect();
        let breakdown = decompose(&self.cfg.pois, &self.table, &ids);
        self.psi = breakdown.psi.clone();
        self.variance = breakdown.poi_variance.clone();
        self.log.fusions.push(breakdown.clone());
        breakdown
    }

    /// Connected agents transmit `H_i` under the latest fused ψ (through any
    /// communication fault); disconnected agents keep their last value.
    fn report_step(&mut self, breakdown: Option<&CostBreakdown>) -> Result<()> {
        for agent in &mut self.agents {
            if agent.connected {
                let mut h = agent_cost_with_psi(agent.id, &self.cfg.pois, &self.table, &self.psi)?;
                for f in agent.injectors(FaultKind::SpuriousComm) {
                    h = f.apply_comm(self.t, h)?;
                }
                agent.reported = h;
            }
            self.log.agent_costs.push(AgentCostRecord {
                t: self.t,
                agent: agent.id,
                fused: breakdown.and_then(|b| b.agent_terms.get(&agent.id).copied()),
                reported: agent.reported,
                connected: agent.connected,
            });
        }
        Ok(())
    }

    fn visible_entries(&self, agent: AgentId) -> Vec<(PoiId, Sigma)> {
        self.table.visible_entries(agent).collect()
    }

    /// Runs the monitor (live) or records the prediction (nominal).
    pub fn fdi_step(&mut self) -> Result<()> {
        let h_real = total_cost(&self.cfg.pois, &self.table);

        if self.recorder.is_some() {
            let mut agents = Vec::with_capacity(self.agents.len());
            for a in &self.agents {
                agents.push(PredictedAgentTick {
                    agent: a.id,
                    position: a.state.position,
                    boresight: a.pose.boresight(),
                    target_poi: a.target,
                    visible: self.visible_entries(a.id),
                    h_pred: agent_cost_with_psi(a.id, &self.cfg.pois, &self.table, &self.psi)?,
                });
            }
            let tick = PredictedTick {
                t: self.t,
                agents,
                h_nom: h_real,
            };
            if let Some(recorder) = self.recorder.as_mut() {
                recorder.ticks.push(tick);
            }
        }

        let (Some(monitor), Some(prediction)) = (self.monitor.as_mut(), self.prediction) else {
            self.log.global.push(GlobalRecord {
                t: self.t,
                h_real,
                h_nom: h_real,
                integral: 0.0,
                global_flag: false,
            });
            self.fdi_index += 1;
            return Ok(());
        };

        let predicted = prediction
            .ticks
            .get(self.fdi_index)
            .filter(|p| p.t == self.t)
            .ok_or(Error::PredictionMismatch { t: self.t })?;
        let mut reports = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            let p = predicted
                .agent(a.id)
                .ok_or(Error::PredictionMismatch { t: self.t })?;
            reports.push(AgentReport {
                agent: a.id,
                connected: a.connected,
                reported: a.reported,
                camera: &a.camera,
                predicted: p,
            });
        }
        let out = monitor.evaluate(
            self.fdi_index as u64,
            self.t,
            &reports,
            &self.psi,
            &self.cfg.pois,
            &self.cfg.target,
            h_real,
            predicted.h_nom,
        );
        self.log
            .fdi
            .extend(out.evaluations.iter().map(FdiRecord::from));
        self.log.global.push(GlobalRecord {
            t: self.t,
            h_real,
            h_nom: predicted.h_nom,
            integral: out.report.integral,
            global_flag: out.report.global_integral_flag,
        });
        self.log.reports.push(out.report);
        self.fdi_index += 1;
        Ok(())
    }

    fn log_states(&mut self) {
        for a in &self.agents {
            let (p, v, b) = (a.state.position, a.state.velocity, a.pose.boresight());
            self.log.states.push(StateRecord {
                t: self.t,
                agent: a.id,
                x: p.x,
                y: p.y,
                z: p.z,
                vx: v.x,
                vy: v.y,
                vz: v.z,
                bx: b.x,
                by: b.y,
                bz: b.z,
                target_poi: a.target,
                visible_count: self.table.visible_entries(a.id).count(),
                connected: a.connected,
            });
        }
    }
}
