//! Discrete-time simulator for a UAV swarm that elects a leader over a
//! range-limited communication graph and follows it to a destination
//! using leader-follower flocking rules.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`);
//! configuration, metrics and file formats use `f64`.
//!
//! ```
//! use swarm_core::{Simulation64, SwarmConfig};
//!
//! let sim = Simulation64::new(SwarmConfig { n: 4, ..SwarmConfig::default() }).unwrap();
//! let result = sim.run();
//! assert!(result.arrived());
//! ```

pub mod check;
pub mod config;
pub mod election;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod flocking;
pub mod metrics;
pub mod scalar;
pub mod topology;
pub mod trace;
pub mod uav;
pub mod vector;

pub use config::{parse_config, write_config, SwarmConfig};
pub use election::{election_converged, leader_of, update_weight, ElectionParams, ElectionScratch};
pub use engine::{deploy, run, tick, Phase, SimResult, SimState, Simulation, UpdateOrder};
pub use error::{ConfigError, DegenerateVector, Error, Result};
pub use experiment::{emit_summary, read_summary, run_experiment, ExperimentSummary};
pub use flocking::{
    alignment_vel, cohesion_vel, flock_terms, leader_goal_vel, separation_vel, step_uav, FlockParams, FlockTerms,
};
pub use metrics::{connectivity_fraction, min_pairwise_distance, overhead_percent, theoretical_time};
pub use scalar::Scalar;
pub use topology::{build_graph, refresh, ProximityGraph};
pub use trace::{emit_trace, read_trace, TraceRecord, UavRecord};
pub use uav::{UavId, UavState, Weight};
pub use vector::{distance, norm_scale, Vec3};

pub type Vec3d = Vec3<f64>;
pub type Vec3f = Vec3<f32>;
pub type UavStateF64 = UavState<f64>;
pub type UavStateF32 = UavState<f32>;
pub type Simulation64 = Simulation<f64>;
pub type Simulation32 = Simulation<f32>;
pub type SimState64 = SimState<f64>;
pub type SimState32 = SimState<f32>;
