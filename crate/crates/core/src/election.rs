//! Weight-based leader election.
//!
//! Every UAV holds an integer weight and, once per tick, recomputes it from
//! the weights its neighbors published at the start of the tick. The four
//! rules are applied in order to a working copy `w`:
//!
//! 1. if `min < w`, then `w = min + 1`
//! 2. if `max == weight_limit`, then `w = leader_id`
//! 3. if `min >= w` and `w != leader_id`, then `w = min + 1`
//! 4. if `w == leader_id` and a neighbor already holding `leader_id` has a
//!    smaller id, then `w = w + 1`
//!
//! `min + 1` saturates at `weight_limit`, so ordinary weights never leave
//! `0..=weight_limit`. A demoted UAV (`leader_id + 1`) drops back into that
//! range on its next update. A UAV without neighbors keeps its weight.

use crate::config::SwarmConfig;
use crate::uav::{UavId, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElectionParams {
    pub weight_limit: Weight,
    pub leader_id: Weight,
}

impl ElectionParams {
    pub fn from_config(cfg: &SwarmConfig) -> Self {
        Self { weight_limit: cfg.weight_limit(), leader_id: cfg.leader_id() }
    }

    fn step_above(&self, w: Weight) -> Weight {
        w.saturating_add(1).min(self.weight_limit)
    }
}

/// Neighborhood summary read by the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElectionScratch {
    /// Largest neighbor weight.
    pub max: Weight,
    /// Smallest neighbor weight.
    pub min: Weight,
    /// Lowest-id neighbor currently holding the leader weight.
    pub leader_neighbor: Option<UavId>,
}

impl ElectionScratch {
    /// `None` for an empty neighborhood.
    pub fn observe(neighbor_weights: &[(UavId, Weight)], params: &ElectionParams) -> Option<Self> {
        let max = neighbor_weights.iter().map(|&(_, w)| w).max()?;
        let min = neighbor_weights.iter().map(|&(_, w)| w).min()?;
        let leader_neighbor = neighbor_weights.iter().filter(|&&(_, w)| w == params.leader_id).map(|&(id, _)| id).min();
        Some(Self { max, min, leader_neighbor })
    }
}

/// Next weight of UAV `self_id` given its neighbors' current weights.
pub fn update_weight(
    self_weight: Weight,
    self_id: UavId,
    neighbor_weights: &[(UavId, Weight)],
    params: &ElectionParams,
) -> Weight {
    let Some(s) = ElectionScratch::observe(neighbor_weights, params) else {
        return self_weight;
    };

    let mut w = self_weight;
    if s.min < w {
        w = params.step_above(s.min);
    }
    if s.max == params.weight_limit {
        w = params.leader_id;
    }
    if s.min >= w && w != params.leader_id {
        w = params.step_above(s.min);
    }
    if w == params.leader_id && s.leader_neighbor.is_some_and(|other| other < self_id) {
        w += 1;
    }
    w
}

/// Lowest id whose weight is the leader sentinel.
pub fn leader_of(weights: &[Weight], params: &ElectionParams) -> Option<UavId> {
    weights.iter().position(|&w| w == params.leader_id).map(UavId::new)
}

pub fn leader_count(weights: &[Weight], params: &ElectionParams) -> usize {
    weights.iter().filter(|&&w| w == params.leader_id).count()
}

/// True once the weight vector has been identical over the last `window`
/// entries of `history` and exactly one UAV holds the leader weight.
pub fn election_converged<W: AsRef<[Weight]>>(history: &[W], window: usize, params: &ElectionParams) -> bool {
    assert!(window >= 1, "window must be >= 1");
    if history.len() < window {
        return false;
    }
    let tail = &history[history.len() - window..];
    let last = tail[tail.len() - 1].as_ref();
    tail.iter().all(|w| w.as_ref() == last) && leader_count(last, params) == 1
}
