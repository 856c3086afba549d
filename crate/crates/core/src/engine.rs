//! Discrete-time simulation loop.
//!
//! One tick is fully synchronous: every UAV reads the tick-`t` snapshot
//! (positions, velocities, weights, graph) and the engine writes all tick
//! `t + 1` values at once, so the order in which UAVs are visited has no
//! effect on the result. Randomness is confined to [`deploy`].

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::SwarmConfig;
use crate::election::{election_converged, leader_of, update_weight, ElectionParams};
use crate::error::ConfigError;
use crate::flocking::{flock_terms, step_uav, FlockParams};
use crate::metrics::min_pairwise_distance;
use crate::scalar::Scalar;
use crate::topology::{build_graph, refresh, ProximityGraph};
use crate::trace::{TraceRecord, UavRecord};
use crate::uav::{UavId, UavState, Weight};
use crate::vector::{distance, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Flying toward the destination on the travel range.
    Travel,
    /// The leader has reached the destination; the full range is in use.
    Arrived,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub tick: u64,
    pub uavs: Vec<UavState<T>>,
    pub graph: ProximityGraph<T>,
    pub phase: Phase,
    rng: ChaCha8Rng,
}

impl<T: Scalar> SimState<T> {
    pub fn positions(&self) -> Vec<Vec3<T>> {
        self.uavs.iter().map(|u| u.pos).collect()
    }

    pub fn weights(&self) -> Vec<Weight> {
        self.uavs.iter().map(|u| u.weight).collect()
    }
}

/// Order in which a tick visits UAVs. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// First tick at which the leader was within `arrive_eps` of the destination.
    pub arrival_tick: Option<u64>,
    pub ticks_run: u64,
    /// First tick at which every UAV was within `all_arrive_radius` of the destination.
    pub all_arrived_tick: Option<u64>,
    /// First tick at which the election counted as converged.
    pub converged_tick: Option<u64>,
    /// Records at every `stride`-th tick, starting with tick 0.
    pub trace: Vec<TraceRecord>,
    /// Lowest-id leader at every tick, starting with tick 0.
    pub leader_timeline: Vec<Option<UavId>>,
    pub max_speed: f64,
    /// Whether any UAV ever left the deployment region.
    pub left_region: bool,
}

impl SimResult {
    pub fn arrived(&self) -> bool {
        self.arrival_tick.is_some()
    }
}

/// A configured simulator for scalar type `T`.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    cfg: SwarmConfig,
    flock: FlockParams<T>,
    election: ElectionParams,
    range: T,
    travel_range: T,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(cfg: SwarmConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        Ok(Self {
            flock: FlockParams::from_config(&cfg),
            election: ElectionParams::from_config(&cfg),
            range: T::of(cfg.range),
            travel_range: T::of(cfg.travel_range()),
            cfg,
        })
    }

    pub fn config(&self) -> &SwarmConfig {
        &self.cfg
    }

    pub fn election_params(&self) -> &ElectionParams {
        &self.election
    }

    /// Places the UAVs uniformly in the cube of half-width `deploy_jitter`
    /// around the deployment point, clipped to the region, at rest.
    pub fn deploy(&self) -> SimState<T> {
        let cfg = &self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let jitter = cfg.deploy_jitter;
        let centre = cfg.deploy.to_f64();

        let mut positions = Vec::with_capacity(cfg.n);
        for _ in 0..cfg.n {
            let mut p = [0.0; 3];
            for (axis, c) in p.iter_mut().enumerate() {
                let offset = if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
                *c = (centre[axis] + offset).clamp(0.0, cfg.side);
            }
            positions.push(Vec3::<T>::from_f64(p));
        }

        let mut weights: Vec<Weight> = (0..cfg.n as Weight).collect();
        if cfg.random_weights {
            weights.shuffle(&mut rng);
        }
        if cfg.n == 1 {
            // nobody to elect against
            weights[0] = self.election.leader_id;
        }

        let graph = build_graph(&positions, self.travel_range);
        let uavs = positions
            .into_iter()
            .zip(weights)
            .enumerate()
            .map(|(i, (pos, w))| UavState::at_rest(UavId::new(i), pos, w))
            .collect();
        SimState { tick: 0, uavs, graph, phase: Phase::Travel, rng }
    }

    pub fn tick(&self, state: &SimState<T>) -> SimState<T> {
        self.tick_with_order(state, UpdateOrder::Ascending)
    }

    /// One synchronous step: refresh the graph, update weights, apply the
    /// flocking rules, then check for arrival.
    pub fn tick_with_order(&self, state: &SimState<T>, order: UpdateOrder) -> SimState<T> {
        let n = state.uavs.len();
        let positions = state.positions();
        let graph = refresh(state.graph.clone(), &positions, state.tick, &self.cfg);

        let visit: Vec<usize> = match order {
            UpdateOrder::Ascending => (0..n).collect(),
            UpdateOrder::Descending => (0..n).rev().collect(),
        };

        let mut next: Vec<Option<UavState<T>>> = vec![None; n];
        let mut neighbor_states = Vec::new();
        let mut neighbor_weights = Vec::new();
        for &i in &visit {
            let u = &state.uavs[i];
            neighbor_states.clear();
            neighbor_states.extend(graph.neighbors(u.id).iter().map(|v| state.uavs[v.index()]));
            neighbor_weights.clear();
            neighbor_weights.extend(neighbor_states.iter().map(|s| (s.id, s.weight)));

            let weight = update_weight(u.weight, u.id, &neighbor_weights, &self.election);
            let is_leader = u.weight == self.election.leader_id;
            let terms = flock_terms(u, &neighbor_states, is_leader, &self.flock);
            let limit = is_leader.then_some(self.flock.leader_vel);
            let moved = step_uav(u, &terms, limit);
            next[i] = Some(UavState { weight, ..moved });
        }
        let uavs: Vec<UavState<T>> = next.into_iter().map(|s| s.expect("every UAV visited")).collect();

        let mut out = SimState { tick: state.tick + 1, uavs, graph, phase: state.phase, rng: state.rng.clone() };
        if out.phase == Phase::Travel {
            let weights = out.weights();
            if let Some(leader) = leader_of(&weights, &self.election) {
                if distance(out.uavs[leader.index()].pos, self.flock.dest) < self.flock.arrive_eps {
                    out.phase = Phase::Arrived;
                    out.graph = build_graph(&out.positions(), self.range);
                }
            }
        }
        out
    }

    /// Observation of `state` for the trace. The recorded edges are those of
    /// the proximity graph at the recorded positions and current range.
    pub fn record(&self, state: &SimState<T>) -> TraceRecord {
        let positions = state.positions();
        let graph = build_graph(&positions, state.graph.range_used());
        let side = self.cfg.side;
        let uavs: Vec<UavRecord> = state
            .uavs
            .iter()
            .map(|u| UavRecord {
                id: u.id,
                pos: u.pos.to_f64(),
                vel: u.vel.to_f64(),
                weight: u.weight,
                leader: u.weight == self.election.leader_id,
            })
            .collect();
        let out_of_region = uavs.iter().any(|u| u.pos.iter().any(|&c| !(0.0..=side).contains(&c)));
        let max_speed = state.uavs.iter().map(|u| u.vel.norm().as_f64()).fold(0.0, f64::max);
        TraceRecord {
            tick: state.tick,
            phase: state.phase,
            connected: graph.is_connected(),
            min_pairwise_distance: min_pairwise_distance(&positions).map(Scalar::as_f64),
            max_speed,
            out_of_region,
            edges: graph.edges().map(|(a, b)| [a, b]).collect(),
            uavs,
        }
    }

    pub fn run(&self) -> SimResult {
        self.run_with_stride(1)
    }

    /// Runs until the leader arrives (plus `post_arrival_ticks`) or
    /// `max_ticks` is exhausted, recording every `stride`-th tick.
    pub fn run_with_stride(&self, stride: u64) -> SimResult {
        assert!(stride >= 1, "trace stride must be >= 1");
        let cfg = &self.cfg;
        let window = cfg.converge_window;
        let all_radius = T::of(cfg.all_arrive_radius);

        let mut state = self.deploy();
        let mut trace = Vec::new();
        let mut leader_timeline = Vec::new();
        let mut recent: VecDeque<Vec<Weight>> = VecDeque::with_capacity(window + 1);
        let mut arrival_tick = None;
        let mut all_arrived_tick = None;
        let mut converged_tick = None;
        let mut max_speed = 0.0f64;
        let mut left_region = false;

        loop {
            let weights = state.weights();
            leader_timeline.push(leader_of(&weights, &self.election));
            recent.push_back(weights);
            if recent.len() > window {
                recent.pop_front();
            }
            if converged_tick.is_none() && election_converged(recent.make_contiguous(), window, &self.election) {
                converged_tick = Some(state.tick);
            }
            if all_arrived_tick.is_none() && state.uavs.iter().all(|u| distance(u.pos, self.flock.dest) < all_radius) {
                all_arrived_tick = Some(state.tick);
            }
            if arrival_tick.is_none() && state.phase == Phase::Arrived {
                arrival_tick = Some(state.tick);
            }

            let speed = state.uavs.iter().map(|u| u.vel.norm().as_f64()).fold(0.0, f64::max);
            max_speed = max_speed.max(speed);
            let side = T::of(cfg.side);
            left_region |=
                state.uavs.iter().any(|u| [u.pos.x, u.pos.y, u.pos.z].iter().any(|&c| c < T::zero() || c > side));

            if state.tick.is_multiple_of(stride) {
                trace.push(self.record(&state));
            }

            let done = arrival_tick.is_some_and(|a| state.tick >= a + cfg.post_arrival_ticks);
            if done || state.tick >= cfg.max_ticks {
                break;
            }
            state = self.tick(&state);
        }

        SimResult {
            arrival_tick,
            ticks_run: state.tick,
            all_arrived_tick,
            converged_tick,
            trace,
            leader_timeline,
            max_speed,
            left_region,
        }
    }
}

/// Deploys a fresh swarm for `cfg`.
pub fn deploy<T: Scalar>(cfg: &SwarmConfig) -> Result<SimState<T>, ConfigError> {
    Ok(Simulation::<T>::new(cfg.clone())?.deploy())
}

/// Advances `state` by one tick under `cfg`.
pub fn tick<T: Scalar>(state: &SimState<T>, cfg: &SwarmConfig) -> Result<SimState<T>, ConfigError> {
    Ok(Simulation::<T>::new(cfg.clone())?.tick(state))
}

/// Runs a full simulation with a trace at every tick.
pub fn run<T: Scalar>(cfg: &SwarmConfig) -> Result<SimResult, ConfigError> {
    Ok(Simulation::<T>::new(cfg.clone())?.run())
}
