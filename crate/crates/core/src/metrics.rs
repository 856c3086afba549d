//! Arrival-time and swarm-health metrics.

use crate::election::{election_converged, ElectionParams};
use crate::error::ConfigError;
use crate::scalar::Scalar;
use crate::trace::TraceRecord;
use crate::vector::{distance, Vec3};

/// Straight-line flight time from `from` to `to` at `leader_vel`, in steps.
pub fn theoretical_time(from: Vec3<f64>, to: Vec3<f64>, leader_vel: f64) -> Result<f64, ConfigError> {
    if !(leader_vel > 0.0 && leader_vel.is_finite()) {
        return Err(ConfigError::field("leader_vel", format!("must be > 0, got {leader_vel}")));
    }
    Ok(distance(from, to) / leader_vel)
}

/// Relative excess of `actual` over `theoretical`, in percent.
///
/// # Panics
/// If `theoretical` is not positive.
pub fn overhead_percent(actual: f64, theoretical: f64) -> f64 {
    assert!(theoretical > 0.0, "theoretical time must be positive, got {theoretical}");
    100.0 * (actual - theoretical) / theoretical
}

/// Smallest distance over all unordered pairs; `None` for fewer than two points.
pub fn min_pairwise_distance<T: Scalar>(positions: &[Vec3<T>]) -> Option<T> {
    let mut best: Option<T> = None;
    for (i, &a) in positions.iter().enumerate() {
        for &b in &positions[i + 1..] {
            let d = distance(a, b);
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivityFraction {
    pub fraction: f64,
    /// Tick of the first record counted; the convergence tick when the
    /// election converged.
    pub from_tick: u64,
    /// False when the election never converged and the fraction covers the whole trace.
    pub converged: bool,
}

/// Fraction of trace records whose proximity graph is connected, counted
/// from the first record at which the election has converged (over the
/// last `window` records).
///
/// # Panics
/// On an empty trace.
pub fn connectivity_fraction(trace: &[TraceRecord], window: usize, params: &ElectionParams) -> ConnectivityFraction {
    assert!(!trace.is_empty(), "trace must not be empty");
    let weights: Vec<Vec<u32>> = trace.iter().map(TraceRecord::weights).collect();
    let start = (0..trace.len()).find(|&i| election_converged(&weights[..=i], window, params));
    let counted = &trace[start.unwrap_or(0)..];
    let connected = counted.iter().filter(|r| r.connected).count();
    ConnectivityFraction {
        fraction: connected as f64 / counted.len() as f64,
        from_tick: counted[0].tick,
        converged: start.is_some(),
    }
}
