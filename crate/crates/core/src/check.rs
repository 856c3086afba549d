//! Invariant checks run by `swarm-sim check` against a configuration
//! (by default the published scenario).

use crate::config::SwarmConfig;
use crate::election::{election_converged, leader_count, ElectionParams};
use crate::engine::{Phase, SimResult, Simulation, UpdateOrder};
use crate::metrics::connectivity_fraction;
use crate::topology::build_graph;
use crate::trace::TraceRecord;
use crate::uav::UavId;
use crate::vector::{distance, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn record_positions(rec: &TraceRecord) -> Vec<Vec3<f64>> {
    rec.uavs.iter().map(|u| Vec3::new(u.pos[0], u.pos[1], u.pos[2])).collect()
}

fn edges_match_pairwise_rule(rec: &TraceRecord, range: f64) -> bool {
    let positions = record_positions(rec);
    let mut want = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if distance(positions[i], positions[j]) <= range {
                want.push((i, j));
            }
        }
    }
    rec.edges.iter().map(|[a, b]| (a.index(), b.index())).eq(want)
}

/// Runs every check over `seeds` consecutive seeds starting at `cfg.seed`.
pub fn run_checks(cfg: &SwarmConfig, seeds: u64) -> Vec<CheckOutcome> {
    let params = ElectionParams::from_config(cfg);
    let sims: Vec<Simulation<f64>> = (0..seeds)
        .map(|k| Simulation::new(SwarmConfig { seed: cfg.seed.wrapping_add(k), ..cfg.clone() }).expect("valid config"))
        .collect();
    let results: Vec<SimResult> = sims.iter().map(Simulation::run).collect();
    let mut out = Vec::new();

    let arrived = results.iter().filter(|r| r.arrived()).count();
    out.push(CheckOutcome::new(
        "arrival",
        arrived == results.len(),
        format!("{arrived}/{} runs arrived", results.len()),
    ));

    let graph_error = results.iter().flat_map(|r| &r.trace).find(|rec| {
        let range = if rec.phase == Phase::Arrived { cfg.range } else { cfg.travel_range() };
        !edges_match_pairwise_rule(rec, range)
    });
    out.push(CheckOutcome::new(
        "graph threshold",
        graph_error.is_none(),
        graph_error.map_or("every recorded edge list matches the pairwise rule".into(), |rec| {
            format!("tick {}: edges differ from the pairwise rule", rec.tick)
        }),
    ));

    let symmetric = results.iter().all(|r| {
        r.trace.iter().all(|rec| {
            let g = build_graph(&record_positions(rec), cfg.range);
            (0..g.len()).all(|u| {
                let u = UavId::new(u);
                !g.has_edge(u, u) && g.neighbors(u).iter().all(|&v| g.has_edge(v, u))
            })
        })
    });
    out.push(CheckOutcome::new("graph symmetry", symmetric, "no self loops, every edge mirrored"));

    let mut election_fail = None;
    for (k, r) in results.iter().enumerate() {
        let weights: Vec<Vec<u32>> = r.trace.iter().map(|t| t.weights()).collect();
        let within = weights.iter().take(51).any(|w| leader_count(w, &params) == 1);
        let converged_in_range =
            (0..weights.len()).find(|&i| election_converged(&weights[..=i], cfg.converge_window, &params)).map(|i| {
                weights[i..]
                    .iter()
                    .take(cfg.converge_window)
                    .all(|w| w.iter().all(|&x| x <= params.weight_limit || x == params.leader_id))
            });
        if !within || converged_in_range != Some(true) {
            election_fail = Some(format!(
                "seed offset {k}: leader within 50 ticks = {within}, converged in range = {converged_in_range:?}"
            ));
            break;
        }
    }
    out.push(CheckOutcome::new(
        "election",
        election_fail.is_none(),
        election_fail.unwrap_or_else(|| "one leader within 50 ticks, converged weights in range".into()),
    ));

    let finite = results.iter().all(|r| r.trace.iter().all(|t| t.is_finite()));
    out.push(CheckOutcome::new("finite trace", finite, "no NaN or Inf in positions or velocities"));

    let min_d = results.iter().flat_map(|r| r.trace.iter().filter_map(|t| t.min_pairwise_distance)).reduce(f64::min);
    out.push(CheckOutcome::new(
        "no collisions",
        min_d.is_none_or(|d| d > 0.0),
        format!("minimum pairwise distance {}", min_d.map_or("n/a".into(), |d| format!("{d:.4} m"))),
    ));

    let worst = results
        .iter()
        .map(|r| connectivity_fraction(&r.trace, cfg.converge_window, &params).fraction)
        .fold(1.0, f64::min);
    out.push(CheckOutcome::new("connectivity", worst >= 0.99, format!("worst post-election connectivity {worst:.4}")));

    let monotone = results
        .iter()
        .all(|r| r.trace.windows(2).all(|w| !(w[0].phase == Phase::Arrived && w[1].phase == Phase::Travel)));
    out.push(CheckOutcome::new("phase monotonic", monotone, "arrived never reverts to travel"));

    let repeat = sims[0].run();
    out.push(CheckOutcome::new("determinism", repeat == results[0], "repeated run reproduces the trace"));

    let sim = &sims[0];
    let mut state = sim.deploy();
    let mut order_free = true;
    for _ in 0..results[0].ticks_run {
        let a = sim.tick_with_order(&state, UpdateOrder::Ascending);
        order_free &= a == sim.tick_with_order(&state, UpdateOrder::Descending);
        state = a;
    }
    out.push(CheckOutcome::new("update order", order_free, "reversed visiting order gives identical ticks"));

    out
}
