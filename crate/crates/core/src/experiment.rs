//! Arrival-time experiment: replicate runs over several swarm sizes and
//! compare the mean arrival tick against straight-line flight.
//!
//! Summary CSV layout (two blocks, no blank line between them):
//!
//! ```text
//! n,replicate,seed,arrival_tick,connectivity_fraction,min_pairwise_distance
//! 4,0,1,195,1,0.12
//! ...
//! n,mean_arrival,overhead_pct
//! 4,195.4,5.29
//! ```
//!
//! Empty cells mean "absent": a censored (non-arrived) run has no
//! `arrival_tick`, and a size whose runs were all censored has no mean.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::SwarmConfig;
use crate::election::ElectionParams;
use crate::engine::Simulation;
use crate::error::{ConfigError, Error, Result};
use crate::metrics::{connectivity_fraction, overhead_percent, theoretical_time};

pub const RUN_HEADER: [&str; 6] =
    ["n", "replicate", "seed", "arrival_tick", "connectivity_fraction", "min_pairwise_distance"];
pub const AGGREGATE_HEADER: [&str; 3] = ["n", "mean_arrival", "overhead_pct"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub arrival_tick: Option<u64>,
    pub connectivity_fraction: f64,
    pub min_pairwise_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub n: usize,
    /// Mean over arrived replicates only.
    pub mean_arrival: Option<f64>,
    pub overhead_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub runs: Vec<RunRow>,
    pub aggregates: Vec<AggregateRow>,
}

impl ExperimentSummary {
    pub fn runs_for(&self, n: usize) -> impl Iterator<Item = &RunRow> {
        self.runs.iter().filter(move |r| r.n == n)
    }

    pub fn aggregate(&self, n: usize) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    /// Replicates of size `n` that did not arrive within the tick budget.
    pub fn censored(&self, n: usize) -> usize {
        self.runs_for(n).filter(|r| r.arrival_tick.is_none()).count()
    }

    pub fn mean_connectivity(&self, n: usize) -> f64 {
        let (sum, count) = self.runs_for(n).fold((0.0, 0usize), |(s, c), r| (s + r.connectivity_fraction, c + 1));
        sum / count as f64
    }

    pub fn min_distance(&self, n: usize) -> Option<f64> {
        self.runs_for(n).filter_map(|r| r.min_pairwise_distance).reduce(f64::min)
    }

    /// Human-readable comparison table.
    pub fn render_table(&self, theoretical: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "theoretical time to destination: {theoretical:.2} steps");
        let _ = writeln!(
            out,
            "{:>4}  {:>12}  {:>10}  {:>8}  {:>12}  {:>12}",
            "n", "mean_arrival", "overhead_%", "censored", "connectivity", "min_dist_m"
        );
        for a in &self.aggregates {
            let fmt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |x| format!("{x:.p$}"));
            let _ = writeln!(
                out,
                "{:>4}  {:>12}  {:>10}  {:>8}  {:>12.4}  {:>12}",
                a.n,
                fmt(a.mean_arrival, 1),
                fmt(a.overhead_pct, 2),
                self.censored(a.n),
                self.mean_connectivity(a.n),
                fmt(self.min_distance(a.n), 3),
            );
        }
        out
    }
}

/// Runs `replicates` simulations for each swarm size with seeds
/// `seed_base + k`. Runs execute in parallel; rows come back ordered by
/// `(n, replicate)`.
pub fn run_experiment(
    base: &SwarmConfig,
    n_values: &[usize],
    replicates: usize,
    seed_base: u64,
) -> Result<ExperimentSummary, ConfigError> {
    if replicates == 0 {
        return Err(ConfigError::field("replicates", "must be >= 1"));
    }
    let theoretical = theoretical_time(base.deploy, base.dest, base.leader_vel)?;

    let jobs: Vec<(usize, usize)> = n_values.iter().flat_map(|&n| (0..replicates).map(move |k| (n, k))).collect();
    let configs = jobs
        .iter()
        .map(|&(n, k)| {
            let cfg = SwarmConfig { n, seed: seed_base.wrapping_add(k as u64), ..base.clone() };
            cfg.validate().map(|_| cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let runs: Vec<RunRow> = jobs
        .par_iter()
        .zip(configs)
        .map(|(&(n, replicate), cfg)| {
            let seed = cfg.seed;
            let window = cfg.converge_window;
            let params = ElectionParams::from_config(&cfg);
            let result = Simulation::<f64>::new(cfg).expect("validated above").run();
            RunRow {
                n,
                replicate,
                seed,
                arrival_tick: result.arrival_tick,
                connectivity_fraction: connectivity_fraction(&result.trace, window, &params).fraction,
                min_pairwise_distance: result.trace.iter().filter_map(|r| r.min_pairwise_distance).reduce(f64::min),
            }
        })
        .collect();

    let aggregates = n_values
        .iter()
        .map(|&n| {
            let arrived: Vec<f64> =
                runs.iter().filter(|r| r.n == n).filter_map(|r| r.arrival_tick).map(|t| t as f64).collect();
            let mean_arrival = (!arrived.is_empty()).then(|| arrived.iter().sum::<f64>() / arrived.len() as f64);
            let overhead_pct = match mean_arrival {
                Some(m) if theoretical > 0.0 => Some(overhead_percent(m, theoretical)),
                _ => None,
            };
            AggregateRow { n, mean_arrival, overhead_pct }
        })
        .collect();

    Ok(ExperimentSummary { runs, aggregates })
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_summary<W: std::io::Write>(summary: &ExperimentSummary, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(RUN_HEADER)?;
    for r in &summary.runs {
        w.write_record([
            r.n.to_string(),
            r.replicate.to_string(),
            r.seed.to_string(),
            cell(r.arrival_tick),
            r.connectivity_fraction.to_string(),
            cell(r.min_pairwise_distance),
        ])?;
    }
    w.write_record(AGGREGATE_HEADER)?;
    for a in &summary.aggregates {
        w.write_record([a.n.to_string(), cell(a.mean_arrival), cell(a.overhead_pct)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the summary CSV.
pub fn emit_summary(summary: &ExperimentSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_summary(summary, file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format { path: path.into(), message: format!("{other:?}") },
    })
}

pub fn parse_summary<R: std::io::Read>(input: R) -> std::result::Result<ExperimentSummary, String> {
    fn opt<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("cannot parse {s:?}"))
        }
    }
    fn req<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
        opt(s)?.ok_or_else(|| "missing required value".to_string())
    }

    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut runs = Vec::new();
    let mut aggregates = Vec::new();
    let mut block = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row: Vec<&str> = rec.iter().collect();
        let ctx = |m: String| format!("row {}: {m}", i + 1);
        match block {
            0 if row == RUN_HEADER => block = 1,
            1 if row == AGGREGATE_HEADER => block = 2,
            1 if row.len() == RUN_HEADER.len() => runs.push(RunRow {
                n: req(row[0]).map_err(ctx)?,
                replicate: req(row[1]).map_err(ctx)?,
                seed: req(row[2]).map_err(ctx)?,
                arrival_tick: opt(row[3]).map_err(ctx)?,
                connectivity_fraction: req(row[4]).map_err(ctx)?,
                min_pairwise_distance: opt(row[5]).map_err(ctx)?,
            }),
            2 if row.len() == AGGREGATE_HEADER.len() => aggregates.push(AggregateRow {
                n: req(row[0]).map_err(ctx)?,
                mean_arrival: opt(row[1]).map_err(ctx)?,
                overhead_pct: opt(row[2]).map_err(ctx)?,
            }),
            _ => return Err(ctx(format!("unexpected row {row:?}"))),
        }
    }
    if block != 2 {
        return Err("missing header row".into());
    }
    Ok(ExperimentSummary { runs, aggregates })
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<ExperimentSummary> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_summary(file).map_err(|message| Error::Format { path: path.into(), message })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SwarmConfig {
        SwarmConfig { max_ticks: 400, ..SwarmConfig::default() }
    }

    #[test]
    fn table_shape() {
        let s = run_experiment(&quick(), &[4, 8, 12], 5, 1).unwrap();
        assert_eq!(s.runs.len(), 15);
        assert_eq!(s.aggregates.len(), 3);
        let order: Vec<(usize, usize)> = s.runs.iter().map(|r| (r.n, r.replicate)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
        assert_eq!(s.runs_for(8).map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn single_replicate_mean_is_its_arrival() {
        let s = run_experiment(&quick(), &[4], 1, 9).unwrap();
        let arrival = s.runs[0].arrival_tick.unwrap() as f64;
        assert_eq!(s.aggregates[0].mean_arrival, Some(arrival));
    }

    #[test]
    fn deterministic_for_equal_seed_base() {
        let a = run_experiment(&quick(), &[4, 8], 2, 3).unwrap();
        let b = run_experiment(&quick(), &[4, 8], 2, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn censored_runs_are_excluded_from_means() {
        let s = run_experiment(&SwarmConfig { max_ticks: 20, ..SwarmConfig::default() }, &[4], 3, 1).unwrap();
        assert_eq!(s.censored(4), 3);
        assert_eq!(s.aggregates[0], AggregateRow { n: 4, mean_arrival: None, overhead_pct: None });
        assert!(s.render_table(185.57).contains('-'));
    }

    #[test]
    fn zero_replicates_rejected() {
        assert!(run_experiment(&quick(), &[4], 0, 1).is_err());
        assert!(run_experiment(&quick(), &[0], 1, 1).is_err());
    }

    #[test]
    fn summary_csv_round_trips() {
        let s = run_experiment(&quick(), &[1, 4], 2, 1).unwrap();
        let mut buf = Vec::new();
        write_summary(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,replicate,seed,arrival_tick,connectivity_fraction,min_pairwise_distance\n"));
        assert!(text.contains("\nn,mean_arrival,overhead_pct\n"));
        assert_eq!(parse_summary(buf.as_slice()).unwrap(), s);

        let censored = run_experiment(&SwarmConfig { max_ticks: 5, ..SwarmConfig::default() }, &[4], 1, 1).unwrap();
        let mut buf = Vec::new();
        write_summary(&censored, &mut buf).unwrap();
        assert_eq!(parse_summary(buf.as_slice()).unwrap(), censored);
    }

    #[test]
    fn malformed_summary_rejected() {
        assert!(parse_summary("a,b\n".as_bytes()).is_err());
        assert!(parse_summary(
            "n,replicate,seed,arrival_tick,connectivity_fraction,min_pairwise_distance\n".as_bytes()
        )
        .is_err());
    }
}
