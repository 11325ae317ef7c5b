//! Timing sweeps over node count, decay, grid size and worker count.
//!
//! Each point is generated `repetitions` times and the shortest wall time is
//! kept. Across a sweep `q` is re-solved so the mean degree stays at the
//! requested value.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{estimate_gtilde, solve_q};
use crate::engine::{Algorithm, GenConfig, Generator};
use crate::error::{Result, SernError};
use crate::geometry::Region;
use crate::model::{Deterrence, Metric};
use crate::rng::RngState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    Nodes,
    Decay,
    Buckets,
    Threads,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::Nodes => "n",
            Sweep::Decay => "s",
            Sweep::Buckets => "M",
            Sweep::Threads => "threads",
        }
    }
}

impl std::str::FromStr for Sweep {
    type Err = SernError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "nodes" => Ok(Sweep::Nodes),
            "s" | "decay" => Ok(Sweep::Decay),
            "m" | "buckets" => Ok(Sweep::Buckets),
            "t" | "threads" => Ok(Sweep::Threads),
            other => Err(SernError::param(format!("unknown sweep '{other}', expected n, s, M or threads"))),
        }
    }
}

/// Parameters held fixed while one of them is swept.
#[derive(Clone, Debug)]
pub struct BenchBase {
    pub n: u64,
    pub kbar: f64,
    pub s: f64,
    pub buckets: usize,
    pub threads: usize,
    pub algorithm: Algorithm,
    pub region: Region,
    pub metric: Metric,
    pub seed: u64,
    /// Point pairs used to estimate `G(s)` when solving for `q`.
    pub gtilde_samples: u64,
}

impl Default for BenchBase {
    fn default() -> Self {
        BenchBase {
            n: 100_000,
            kbar: 1.0,
            s: 0.1,
            buckets: 10,
            threads: 1,
            algorithm: Algorithm::Bucket,
            region: Region::unit_square(),
            metric: Metric::Euclidean,
            seed: 1,
            gtilde_samples: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub sweep_name: String,
    pub param: f64,
    pub n: u64,
    pub e: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub threads: usize,
    pub seconds: f64,
}

pub const CSV_HEADER: &str = "sweep_name,param,n,e,M,threads,seconds";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6}",
            self.sweep_name, self.param, self.n, self.e, self.m, self.threads, self.seconds
        )
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()?;
    Ok(())
}

/// Runs one sweep, best of `repetitions` per point.
pub fn sweep(kind: Sweep, base: &BenchBase, points: &[f64], repetitions: usize) -> Result<Vec<BenchRow>> {
    if points.is_empty() {
        return Err(SernError::param("a sweep needs at least one point"));
    }
    let mut gtilde: HashMap<u64, f64> = HashMap::new();
    let mut rows = Vec::with_capacity(points.len());
    for &p in points {
        let mut b = base.clone();
        match kind {
            Sweep::Nodes => b.n = p as u64,
            Sweep::Decay => b.s = p,
            Sweep::Buckets => b.buckets = p as usize,
            Sweep::Threads => b.threads = p as usize,
        }
        let g = *gtilde.entry(b.s.to_bits()).or_insert_with(|| {
            let mut rng = RngState::derive(base.seed, u64::MAX, b.s.to_bits());
            estimate_gtilde(&b.region, &b.metric, b.s, b.gtilde_samples, &mut rng).estimate
        });
        let q = solve_q(b.n, b.kbar, g)?;
        let mut config = GenConfig::new(b.n, Deterrence::Waxman { q, s: b.s });
        config.region = b.region.clone();
        config.metric = b.metric.clone();
        config.buckets = b.buckets;
        config.threads = b.threads;
        config.algorithm = b.algorithm;
        config.allow_large_naive = true;
        let generator = Generator::new(config)?;
        let mut best = f64::INFINITY;
        let mut edges = 0;
        for r in 0..repetitions.max(1) {
            let start = Instant::now();
            let graph = generator.generate_seeded(b.seed.wrapping_add(r as u64))?;
            let t = start.elapsed().as_secs_f64();
            if t < best {
                best = t;
                edges = graph.edges.len() as u64;
            }
        }
        rows.push(BenchRow {
            sweep_name: kind.name().to_string(),
            param: p,
            n: b.n,
            e: edges,
            m: b.buckets,
            threads: b.threads,
            seconds: best,
        });
    }
    Ok(rows)
}
