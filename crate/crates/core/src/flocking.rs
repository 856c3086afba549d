//! Leader-follower flocking rules.
//!
//! Each UAV adds four velocity contributions per tick: cohesion toward the
//! mean neighbor position, separation away from neighbors closer than
//! `sep_radius`, alignment toward the mean neighbor velocity, and (leader
//! only) a goal-seeking term of length `leader_vel` toward the destination.
//! All three neighbor rules vanish for a UAV without neighbors.

use crate::config::SwarmConfig;
use crate::scalar::Scalar;
use crate::uav::UavState;
use crate::vector::{distance, norm_scale, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlockParams<T> {
    pub cohesion_gain: T,
    pub sep_radius: T,
    pub align_gain: T,
    pub leader_vel: T,
    pub arrive_eps: T,
    pub dest: Vec3<T>,
}

impl<T: Scalar> FlockParams<T> {
    pub fn from_config(cfg: &SwarmConfig) -> Self {
        Self {
            cohesion_gain: T::of(cfg.cohesion_gain),
            sep_radius: T::of(cfg.sep_radius),
            align_gain: T::of(cfg.align_gain),
            leader_vel: T::of(cfg.leader_vel),
            arrive_eps: T::of(cfg.arrive_eps),
            dest: Vec3::from_f64(cfg.dest.to_f64()),
        }
    }
}

/// The four velocity contributions for one UAV and one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlockTerms<T> {
    pub cohesion: Vec3<T>,
    pub separation: Vec3<T>,
    pub alignment: Vec3<T>,
    /// Zero for every non-leader.
    pub goal: Vec3<T>,
}

impl<T: Scalar> FlockTerms<T> {
    pub fn zero() -> Self {
        Self { cohesion: Vec3::zero(), separation: Vec3::zero(), alignment: Vec3::zero(), goal: Vec3::zero() }
    }

    pub fn total(&self) -> Vec3<T> {
        self.cohesion + self.separation + self.alignment + self.goal
    }

    pub fn is_finite(&self) -> bool {
        self.cohesion.is_finite() && self.separation.is_finite() && self.alignment.is_finite() && self.goal.is_finite()
    }
}

fn mean<T: Scalar>(vs: impl ExactSizeIterator<Item = Vec3<T>>) -> Option<Vec3<T>> {
    let count = vs.len();
    if count == 0 {
        return None;
    }
    let count = T::from_usize(count).expect("neighbor count fits the scalar type");
    Some(vs.sum::<Vec3<T>>() / count)
}

/// `(mean neighbor position - pos) * cohesion_gain`.
pub fn cohesion_vel<T: Scalar>(u: &UavState<T>, neighbors: &[UavState<T>], p: &FlockParams<T>) -> Vec3<T> {
    match mean(neighbors.iter().map(|n| n.pos)) {
        Some(centre) => (centre - u.pos) * p.cohesion_gain,
        None => Vec3::zero(),
    }
}

/// Sum of `-(n.pos - pos)` over neighbors strictly closer than `sep_radius`.
pub fn separation_vel<T: Scalar>(u: &UavState<T>, neighbors: &[UavState<T>], p: &FlockParams<T>) -> Vec3<T> {
    neighbors.iter().filter(|n| distance(n.pos, u.pos) < p.sep_radius).map(|n| u.pos - n.pos).sum()
}

/// `(mean neighbor velocity - vel) * align_gain`.
pub fn alignment_vel<T: Scalar>(u: &UavState<T>, neighbors: &[UavState<T>], p: &FlockParams<T>) -> Vec3<T> {
    match mean(neighbors.iter().map(|n| n.vel)) {
        Some(avg) => (avg - u.vel) * p.align_gain,
        None => Vec3::zero(),
    }
}

/// Velocity of length `leader_vel` toward the destination, or zero when `u`
/// is not a leader or is already within `arrive_eps` of it.
pub fn leader_goal_vel<T: Scalar>(u: &UavState<T>, is_leader: bool, p: &FlockParams<T>) -> Vec3<T> {
    if !is_leader {
        return Vec3::zero();
    }
    let diff = p.dest - u.pos;
    if diff.norm() < p.arrive_eps {
        return Vec3::zero();
    }
    norm_scale(diff, p.leader_vel).expect("arrive_eps > 0 keeps diff nonzero")
}

pub fn flock_terms<T: Scalar>(
    u: &UavState<T>,
    neighbors: &[UavState<T>],
    is_leader: bool,
    p: &FlockParams<T>,
) -> FlockTerms<T> {
    FlockTerms {
        cohesion: cohesion_vel(u, neighbors, p),
        separation: separation_vel(u, neighbors, p),
        alignment: alignment_vel(u, neighbors, p),
        goal: leader_goal_vel(u, is_leader, p),
    }
}

/// Adds the terms to the velocity, then moves one step.
///
/// With `speed_limit` set, the new velocity is shortened to that length if
/// it is longer. The engine passes `leader_vel` for leaders so a leader never
/// flies faster than its configured speed.
pub fn step_uav<T: Scalar>(u: &UavState<T>, terms: &FlockTerms<T>, speed_limit: Option<T>) -> UavState<T> {
    debug_assert!(terms.is_finite());
    let mut vel = u.vel + terms.total();
    if let Some(limit) = speed_limit {
        let speed = vel.norm();
        if speed > limit {
            vel = vel * (limit / speed);
        }
    }
    UavState { id: u.id, pos: u.pos + vel, vel, weight: u.weight }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uav::UavId;

    type V = Vec3<f64>;

    fn params() -> FlockParams<f64> {
        FlockParams {
            cohesion_gain: 0.2,
            sep_radius: 100.0,
            align_gain: 0.2,
            leader_vel: 0.7,
            arrive_eps: 5.0,
            dest: V::new(100.0, 100.0, 100.0),
        }
    }

    fn at(i: usize, pos: V) -> UavState<f64> {
        UavState::at_rest(UavId::new(i), pos, 0)
    }

    fn moving(i: usize, pos: V, vel: V) -> UavState<f64> {
        UavState { vel, ..at(i, pos) }
    }

    #[test]
    fn cohesion_examples() {
        let p = params();
        let u = at(0, V::new(1.0, 0.0, 0.0));
        assert_eq!(cohesion_vel(&u, &[at(1, V::zero()), at(2, V::new(2.0, 0.0, 0.0))], &p), V::zero());
        let u = at(0, V::zero());
        assert_eq!(cohesion_vel(&u, &[at(1, V::new(10.0, 0.0, 0.0))], &p), V::new(2.0, 0.0, 0.0));
        assert_eq!(cohesion_vel(&u, &[], &p), V::zero());
    }

    #[test]
    fn separation_examples() {
        let p = params();
        let u = at(0, V::new(7.0, 7.0, 7.0));
        let near = at(1, V::new(10.0, 7.0, 7.0));
        assert_eq!(separation_vel(&u, &[near], &p), V::new(-3.0, 0.0, 0.0));
        let pair = [at(1, V::new(12.0, 7.0, 7.0)), at(2, V::new(2.0, 7.0, 7.0))];
        assert_eq!(separation_vel(&u, &pair, &p), V::zero());
        let far = at(1, V::new(157.0, 7.0, 7.0));
        assert_eq!(separation_vel(&u, &[far], &p), V::zero());
    }

    #[test]
    fn separation_radius_is_strict() {
        let p = FlockParams { sep_radius: 3.0, ..params() };
        let u = at(0, V::zero());
        assert_eq!(separation_vel(&u, &[at(1, V::new(3.0, 0.0, 0.0))], &p), V::zero());
        assert_eq!(separation_vel(&u, &[at(1, V::new(2.5, 0.0, 0.0))], &p), V::new(-2.5, 0.0, 0.0));
    }

    #[test]
    fn alignment_examples() {
        let p = params();
        let common = V::new(0.3, -0.1, 0.2);
        let u = moving(0, V::zero(), common);
        let ns = [moving(1, V::new(1.0, 0.0, 0.0), common), moving(2, V::new(0.0, 1.0, 0.0), common)];
        assert_eq!(alignment_vel(&u, &ns, &p), V::zero());

        let u = at(0, V::zero());
        let ns = [moving(1, V::zero(), V::new(1.0, 0.0, 0.0)), moving(2, V::zero(), V::new(3.0, 0.0, 0.0))];
        let a = alignment_vel(&u, &ns, &p);
        assert!((a - V::new(0.4, 0.0, 0.0)).norm() < 1e-12);
        assert_eq!(alignment_vel(&u, &[], &p), V::zero());
    }

    #[test]
    fn alignment_with_a_single_neighbor_is_defined() {
        let u = at(0, V::zero());
        let a = alignment_vel(&u, &[moving(1, V::zero(), V::new(1.0, 0.0, 0.0))], &params());
        assert!((a - V::new(0.2, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn goal_examples() {
        let p = params();
        let g = leader_goal_vel(&at(0, V::new(25.0, 25.0, 25.0)), true, &p);
        for c in [g.x, g.y, g.z] {
            assert!((c - 0.40415).abs() < 1e-4);
        }
        assert!((g.norm() - 0.7).abs() < 1e-12);

        let near = at(0, V::new(100.0, 100.0, 97.0));
        assert_eq!(leader_goal_vel(&near, true, &p), V::zero());
        assert_eq!(leader_goal_vel(&at(0, V::new(25.0, 25.0, 25.0)), false, &p), V::zero());
    }

    #[test]
    fn step_examples() {
        let drift = moving(0, V::zero(), V::new(1.0, 0.0, 0.0));
        let s = step_uav(&drift, &FlockTerms::zero(), None);
        assert_eq!((s.pos, s.vel), (V::new(1.0, 0.0, 0.0), V::new(1.0, 0.0, 0.0)));

        let rest = at(0, V::zero());
        let terms = FlockTerms { cohesion: V::new(0.5, 0.0, 0.0), ..FlockTerms::zero() };
        let s = step_uav(&rest, &terms, None);
        assert_eq!((s.pos, s.vel), (V::new(0.5, 0.0, 0.0), V::new(0.5, 0.0, 0.0)));

        let leader = UavState { weight: 9, ..at(3, V::new(25.0, 25.0, 25.0)) };
        let terms = flock_terms(&leader, &[], true, &params());
        let s = step_uav(&leader, &terms, Some(0.7));
        for c in s.pos.to_f64() {
            assert!((c - 25.40415).abs() < 1e-4);
        }
        assert_eq!((s.id, s.weight), (leader.id, 9));
    }

    #[test]
    fn speed_limit_shortens_only_fast_velocities() {
        let fast = moving(0, V::zero(), V::new(0.6, 0.0, 0.0));
        let terms = FlockTerms { goal: V::new(0.7, 0.0, 0.0), ..FlockTerms::zero() };
        let s = step_uav(&fast, &terms, Some(0.7));
        assert!((s.vel.norm() - 0.7).abs() < 1e-12);
        let slow =
            step_uav(&at(0, V::zero()), &FlockTerms { goal: V::new(0.3, 0.0, 0.0), ..FlockTerms::zero() }, Some(0.7));
        assert_eq!(slow.vel, V::new(0.3, 0.0, 0.0));
    }

    #[test]
    fn isolated_leader_flies_straight_at_constant_speed() {
        let p = params();
        let mut u = UavState { weight: 9, ..at(0, V::new(25.0, 25.0, 25.0)) };
        let mut last = distance(u.pos, p.dest);
        let mut ticks = 0;
        while distance(u.pos, p.dest) >= p.arrive_eps {
            u = step_uav(&u, &flock_terms(&u, &[], true, &p), Some(p.leader_vel));
            assert!((u.vel.norm() - 0.7).abs() < 1e-12);
            let now = distance(u.pos, p.dest);
            assert!(now < last);
            last = now;
            ticks += 1;
        }
        // 75*sqrt(3) - 0.7 k < 5 first holds at k = 179
        assert_eq!(ticks, 179);
    }

    #[test]
    fn resting_isolated_follower_stays_put() {
        let p = params();
        let mut u = at(4, V::new(30.0, 40.0, 50.0));
        for _ in 0..100 {
            u = step_uav(&u, &flock_terms(&u, &[], false, &p), None);
        }
        assert_eq!(u.pos, V::new(30.0, 40.0, 50.0));
    }
}
