//! Swarm configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! uavs = 8
//! range = 55
//! deploy = 25, 25, 25
//! ```
//!
//! Every key is optional; omitted keys take the values of
//! [`SwarmConfig::default`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{ConfigError, Error, Result};
use crate::vector::Vec3;

/// Every constant of a simulation run. Values are stored in `f64`; the
/// engine converts them to its scalar type at deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    /// Number of UAVs.
    pub n: usize,
    /// Side length of the cubic deployment region, meters.
    pub side: f64,
    /// Full transmission range, meters.
    pub range: f64,
    /// Reduced range used while travelling; `None` means `range`.
    pub travel_range: Option<f64>,
    /// Neighbor lists are rebuilt every `refresh_ticks` ticks.
    pub refresh_ticks: u64,
    pub deploy: Vec3<f64>,
    pub dest: Vec3<f64>,
    /// Leader speed, meters per step.
    pub leader_vel: f64,
    /// The leader has arrived once it is strictly closer than this to `dest`.
    pub arrive_eps: f64,
    /// Largest ordinary election weight; `None` means `n`.
    pub weight_limit: Option<u32>,
    /// Sentinel weight marking the leader; `None` means `weight_limit + 1`.
    pub leader_id: Option<u32>,
    pub cohesion_gain: f64,
    /// Neighbors strictly closer than this repel.
    pub sep_radius: f64,
    pub align_gain: f64,
    /// Half-width of the cube around `deploy` that initial positions are drawn from.
    pub deploy_jitter: f64,
    /// Assign a seeded random permutation of `0..n` as initial weights instead of ids.
    pub random_weights: bool,
    pub seed: u64,
    pub max_ticks: u64,
    /// Ticks the weight vector must stay unchanged to count as converged.
    pub converge_window: usize,
    /// Radius around `dest` used by the all-UAV arrival metric.
    pub all_arrive_radius: f64,
    /// Ticks to keep simulating after the leader arrives.
    pub post_arrival_ticks: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            n: 8,
            side: 200.0,
            range: 55.0,
            travel_range: None,
            refresh_ticks: 1,
            deploy: Vec3::new(25.0, 25.0, 25.0),
            dest: Vec3::new(100.0, 100.0, 100.0),
            leader_vel: 0.7,
            arrive_eps: 5.0,
            weight_limit: None,
            leader_id: None,
            cohesion_gain: 0.2,
            sep_radius: 1.0,
            align_gain: 0.2,
            deploy_jitter: 5.0,
            random_weights: false,
            seed: 1,
            max_ticks: 5000,
            converge_window: 5,
            all_arrive_radius: 20.0,
            post_arrival_ticks: 0,
        }
    }
}

impl SwarmConfig {
    pub fn weight_limit(&self) -> u32 {
        self.weight_limit.unwrap_or(self.n as u32)
    }

    pub fn leader_id(&self) -> u32 {
        self.leader_id.unwrap_or(self.weight_limit() + 1)
    }

    pub fn travel_range(&self) -> f64 {
        self.travel_range.unwrap_or(self.range)
    }

    /// Checks every invariant, naming the first offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::field(field, format!("must be a finite number > 0, got {v}")))
            }
        }
        fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::field(field, format!("must be a finite number >= 0, got {v}")))
            }
        }
        fn finite_vec(field: &str, v: Vec3<f64>) -> Result<(), ConfigError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::field(field, "components must be finite"))
            }
        }

        if self.n == 0 {
            return Err(ConfigError::field("uavs", "must be >= 1"));
        }
        if u32::try_from(self.n).is_err() {
            return Err(ConfigError::field("uavs", "too many UAVs"));
        }
        positive("side", self.side)?;
        positive("range", self.range)?;
        if let Some(r) = self.travel_range {
            positive("travel_range", r)?;
        }
        if self.refresh_ticks == 0 {
            return Err(ConfigError::field("refresh_ticks", "must be >= 1"));
        }
        finite_vec("deploy", self.deploy)?;
        finite_vec("dest", self.dest)?;
        positive("leader_vel", self.leader_vel)?;
        positive("arrive_eps", self.arrive_eps)?;
        if self.leader_id() <= self.weight_limit() {
            return Err(ConfigError::field(
                "leader_id",
                format!("must exceed weight_limit ({}), got {}", self.weight_limit(), self.leader_id()),
            ));
        }
        if self.leader_id() == u32::MAX {
            return Err(ConfigError::field("leader_id", "must leave room for demotion (< u32::MAX)"));
        }
        if !self.cohesion_gain.is_finite() {
            return Err(ConfigError::field("cohesion_gain", "must be finite"));
        }
        if !self.align_gain.is_finite() {
            return Err(ConfigError::field("align_gain", "must be finite"));
        }
        non_negative("sep_radius", self.sep_radius)?;
        non_negative("deploy_jitter", self.deploy_jitter)?;
        if self.max_ticks == 0 {
            return Err(ConfigError::field("max_ticks", "must be >= 1"));
        }
        if self.converge_window == 0 {
            return Err(ConfigError::field("converge_window", "must be >= 1"));
        }
        positive("all_arrive_radius", self.all_arrive_radius)?;
        Ok(())
    }

    /// Parses the flat config format, then validates the result.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SwarmConfig::default();
        let mut seen = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::field(line, "expected `key = value`").at_line(line_no))?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::field(key, "duplicate key").at_line(line_no));
            }
            cfg.set(key, value).map_err(|e| e.at_line(line_no))?;
        }

        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "uavs" => self.n = scalar(key, value)?,
            "side" => self.side = scalar(key, value)?,
            "range" => self.range = scalar(key, value)?,
            "travel_range" => self.travel_range = Some(scalar(key, value)?),
            "refresh_ticks" => self.refresh_ticks = scalar(key, value)?,
            "deploy" => self.deploy = triple(key, value)?,
            "dest" => self.dest = triple(key, value)?,
            "leader_vel" => self.leader_vel = scalar(key, value)?,
            "arrive_eps" => self.arrive_eps = scalar(key, value)?,
            "weight_limit" => self.weight_limit = Some(scalar(key, value)?),
            "leader_id" => self.leader_id = Some(scalar(key, value)?),
            "cohesion_gain" => self.cohesion_gain = scalar(key, value)?,
            "sep_radius" => self.sep_radius = scalar(key, value)?,
            "align_gain" => self.align_gain = scalar(key, value)?,
            "deploy_jitter" => self.deploy_jitter = scalar(key, value)?,
            "random_weights" => self.random_weights = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "max_ticks" => self.max_ticks = scalar(key, value)?,
            "converge_window" => self.converge_window = scalar(key, value)?,
            "all_arrive_radius" => self.all_arrive_radius = scalar(key, value)?,
            "post_arrival_ticks" => self.post_arrival_ticks = scalar(key, value)?,
            _ => return Err(ConfigError::field(key, "unknown key")),
        }
        Ok(())
    }

    /// Serializes to the flat format. `parse(to_config_string(c)) == c` for any valid `c`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let vec = |v: Vec3<f64>| format!("{}, {}, {}", v.x, v.y, v.z);
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("uavs", self.n.to_string());
        kv("side", self.side.to_string());
        kv("range", self.range.to_string());
        if let Some(r) = self.travel_range {
            kv("travel_range", r.to_string());
        }
        kv("refresh_ticks", self.refresh_ticks.to_string());
        kv("deploy", vec(self.deploy));
        kv("dest", vec(self.dest));
        kv("leader_vel", self.leader_vel.to_string());
        kv("arrive_eps", self.arrive_eps.to_string());
        if let Some(w) = self.weight_limit {
            kv("weight_limit", w.to_string());
        }
        if let Some(l) = self.leader_id {
            kv("leader_id", l.to_string());
        }
        kv("cohesion_gain", self.cohesion_gain.to_string());
        kv("sep_radius", self.sep_radius.to_string());
        kv("align_gain", self.align_gain.to_string());
        kv("deploy_jitter", self.deploy_jitter.to_string());
        kv("random_weights", self.random_weights.to_string());
        kv("seed", self.seed.to_string());
        kv("max_ticks", self.max_ticks.to_string());
        kv("converge_window", self.converge_window.to_string());
        kv("all_arrive_radius", self.all_arrive_radius.to_string());
        kv("post_arrival_ticks", self.post_arrival_ticks.to_string());
        out
    }
}

fn scalar<V: FromStr>(key: &str, value: &str) -> Result<V, ConfigError>
where
    V::Err: std::fmt::Display,
{
    value.parse().map_err(|e| ConfigError::field(key, format!("cannot parse {value:?}: {e}")))
}

fn triple(key: &str, value: &str) -> Result<Vec3<f64>, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(ConfigError::field(key, format!("expected x, y, z but got {value:?}")));
    }
    let mut xyz = [0.0; 3];
    for (slot, part) in xyz.iter_mut().zip(&parts) {
        *slot = scalar(key, part)?;
    }
    Ok(Vec3::new(xyz[0], xyz[1], xyz[2]))
}

/// Reads and parses a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SwarmConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(SwarmConfig::parse(&text)?)
}

/// Writes a config file in the flat format.
pub fn write_config(cfg: &SwarmConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, cfg.to_config_string()).map_err(|e| Error::io(path, e))
}
