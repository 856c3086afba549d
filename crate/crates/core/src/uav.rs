use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Election weight. Ordinary weights lie in `0..=weight_limit`; the leader
/// holds the sentinel `leader_id`.
pub type Weight = u32;

/// Stable identifier of a UAV; ids are `0..n` with no gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UavId(u32);

impl UavId {
    pub fn new(index: usize) -> Self {
        Self(u32::try_from(index).expect("UAV index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for UavId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState<T> {
    pub id: UavId,
    pub pos: Vec3<T>,
    /// Meters per step.
    pub vel: Vec3<T>,
    pub weight: Weight,
}

impl<T: Scalar> UavState<T> {
    pub fn at_rest(id: UavId, pos: Vec3<T>, weight: Weight) -> Self {
        Self { id, pos, vel: Vec3::zero(), weight }
    }
}
