//! Range-limited communication graph.
//!
//! Two UAVs share an edge exactly when their distance is `<= range`. The
//! graph is rebuilt from scratch on every refresh; construction is the plain
//! pairwise scan, which is plenty for swarms of a few dozen nodes.

use std::collections::VecDeque;

use crate::config::SwarmConfig;
use crate::scalar::Scalar;
use crate::uav::UavId;
use crate::vector::{distance, Vec3};

/// Immutable snapshot of the symmetric proximity graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityGraph<T> {
    adjacency: Vec<Vec<UavId>>,
    range_used: T,
}

impl<T: Scalar> ProximityGraph<T> {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn range_used(&self) -> T {
        self.range_used
    }

    /// Neighbors of `u`, ascending by id.
    ///
    /// # Panics
    /// If `u` is not a node of this graph.
    pub fn neighbors(&self, u: UavId) -> &[UavId] {
        &self.adjacency[u.index()]
    }

    pub fn degree(&self, u: UavId) -> usize {
        self.neighbors(u).len()
    }

    pub fn has_edge(&self, u: UavId, v: UavId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges as `(lo, hi)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (UavId, UavId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, ns)| {
            let u = UavId::new(u);
            ns.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Whether a traversal from node 0 reaches every node. A single node is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for v in &self.adjacency[u] {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    reached += 1;
                    queue.push_back(v.index());
                }
            }
        }
        reached == n
    }
}

/// Builds the proximity graph for `positions` with the edge rule `dist <= range`.
pub fn build_graph<T: Scalar>(positions: &[Vec3<T>], range: T) -> ProximityGraph<T> {
    debug_assert!(range > T::zero(), "range must be positive");
    debug_assert!(positions.iter().all(|p| p.is_finite()), "positions must be finite");

    let n = positions.len();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if distance(positions[i], positions[j]) <= range {
                adjacency[i].push(UavId::new(j));
                adjacency[j].push(UavId::new(i));
            }
        }
    }
    // i < j loop pushes in ascending order for both endpoints
    debug_assert!(adjacency.iter().all(|ns| ns.windows(2).all(|w| w[0] < w[1])));
    ProximityGraph { adjacency, range_used: range }
}

/// Rebuilds `g` from `positions` on ticks that are multiples of the refresh
/// interval; otherwise returns it unchanged.
pub fn refresh<T: Scalar>(
    g: ProximityGraph<T>,
    positions: &[Vec3<T>],
    tick: u64,
    cfg: &SwarmConfig,
) -> ProximityGraph<T> {
    assert_eq!(positions.len(), g.len(), "position count must match graph size");
    if tick.is_multiple_of(cfg.refresh_ticks) {
        build_graph(positions, g.range_used)
    } else {
        g
    }
}
