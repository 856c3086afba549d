use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swarm_core::check::run_checks;
use swarm_core::{
    emit_summary, emit_trace, parse_config, run_experiment, theoretical_time, Simulation64, SwarmConfig, Vec3,
};

#[derive(Parser)]
#[command(name = "swarm-sim", version, about = "Leader-follower UAV swarm simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one swarm flight and optionally write its trace.
    Run(RunArgs),
    /// Run replicated flights for several swarm sizes and summarize arrival times.
    Experiment(ExperimentArgs),
    /// Run the built-in invariant checks.
    Check(CheckArgs),
}

#[derive(Args)]
struct Overrides {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    travel_range: Option<f64>,
    #[arg(long)]
    side: Option<f64>,
    #[arg(long, value_parser = parse_point)]
    deploy: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_point)]
    dest: Option<[f64; 3]>,
    #[arg(long)]
    leader_vel: Option<f64>,
    #[arg(long)]
    arrive_eps: Option<f64>,
    #[arg(long)]
    sep_radius: Option<f64>,
    #[arg(long)]
    max_ticks: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    uavs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the trace as JSON Lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record every k-th tick.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trace_stride: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 12])]
    uavs: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[arg(long, default_value_t = 1)]
    seed_base: u64,
    /// Write the summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Number of consecutive seeds to check.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> =
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected x,y,z, got {} values", v.len()))
}

impl Overrides {
    fn apply(&self) -> swarm_core::Result<SwarmConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path)?,
            None => SwarmConfig::default(),
        };
        if let Some(v) = self.range {
            cfg.range = v;
        }
        if let Some(v) = self.travel_range {
            cfg.travel_range = Some(v);
        }
        if let Some(v) = self.side {
            cfg.side = v;
        }
        if let Some(v) = self.deploy {
            cfg.deploy = Vec3::from_f64(v);
        }
        if let Some(v) = self.dest {
            cfg.dest = Vec3::from_f64(v);
        }
        if let Some(v) = self.leader_vel {
            cfg.leader_vel = v;
        }
        if let Some(v) = self.arrive_eps {
            cfg.arrive_eps = v;
        }
        if let Some(v) = self.sep_radius {
            cfg.sep_radius = v;
        }
        if let Some(v) = self.max_ticks {
            cfg.max_ticks = v;
        }
        Ok(cfg)
    }
}

fn run(args: RunArgs) -> swarm_core::Result<ExitCode> {
    let mut cfg = args.overrides.apply()?;
    if let Some(n) = args.uavs {
        cfg.n = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let sim = Simulation64::new(cfg)?;
    let result = sim.run_with_stride(args.trace_stride);
    if let Some(path) = &args.trace {
        emit_trace(&result, path)?;
    }
    let cfg = sim.config();
    let theoretical = theoretical_time(cfg.deploy, cfg.dest, cfg.leader_vel)?;
    println!("uavs: {}  seed: {}  theoretical: {theoretical:.2} steps", cfg.n, cfg.seed);
    match result.arrival_tick {
        Some(t) => {
            let overhead = if theoretical > 0.0 {
                format!("{:.2}%", swarm_core::overhead_percent(t as f64, theoretical))
            } else {
                "n/a".into()
            };
            println!("arrived at tick {t} (overhead {overhead}), ran {} ticks", result.ticks_run);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("did not arrive within {} ticks", cfg.max_ticks);
            Ok(ExitCode::from(2))
        }
    }
}

fn experiment(args: ExperimentArgs) -> swarm_core::Result<ExitCode> {
    let cfg = args.overrides.apply()?;
    let summary = run_experiment(&cfg, &args.uavs, args.replicates, args.seed_base)?;
    if let Some(path) = &args.summary {
        emit_summary(&summary, path)?;
    }
    print!("{}", summary.render_table(theoretical_time(cfg.deploy, cfg.dest, cfg.leader_vel)?));
    let censored: usize = args.uavs.iter().map(|&n| summary.censored(n)).sum();
    Ok(if censored == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn check(args: CheckArgs) -> swarm_core::Result<ExitCode> {
    let cfg = args.overrides.apply()?;
    cfg.validate()?;
    let outcomes = run_checks(&cfg, args.seeds.max(1));
    for o in &outcomes {
        println!("{o}");
    }
    Ok(if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    // Exit code 2 means "did not arrive", so usage errors report 1 instead.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Experiment(a) => experiment(a),
        Command::Check(a) => check(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
