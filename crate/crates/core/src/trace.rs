//! JSON Lines trace files: one [`TraceRecord`] per line, ordered by tick.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Phase, SimResult};
use crate::error::{Error, Result};
use crate::uav::{UavId, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavRecord {
    pub id: UavId,
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    pub weight: Weight,
    pub leader: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub phase: Phase,
    pub connected: bool,
    /// `null` for a single UAV.
    pub min_pairwise_distance: Option<f64>,
    pub max_speed: f64,
    /// Some UAV is outside the deployment region.
    pub out_of_region: bool,
    pub edges: Vec<[UavId; 2]>,
    pub uavs: Vec<UavRecord>,
}

impl TraceRecord {
    pub fn weights(&self) -> Vec<Weight> {
        self.uavs.iter().map(|u| u.weight).collect()
    }

    /// All recorded numbers are finite.
    pub fn is_finite(&self) -> bool {
        self.max_speed.is_finite()
            && self.min_pairwise_distance.is_none_or(f64::is_finite)
            && self.uavs.iter().all(|u| u.pos.iter().chain(&u.vel).all(|c| c.is_finite()))
    }
}

pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes the trace of `result` as JSON Lines.
pub fn emit_trace(result: &SimResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(&result.trace, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| Error::Format { path: path.into(), message: format!("line {}: {e}", i + 1) })?;
        out.push(record);
    }
    Ok(out)
}
