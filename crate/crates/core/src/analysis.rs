//! Degree and edge-length summaries, and the mean-degree prediction
//! `k = (n - 1) q G(s)` where `G(s) = E[exp(-s d)]` over uniform point pairs.

use std::fmt::Write as _;

use serde::Serialize;

use crate::edgegen::EdgeStore;
use crate::error::{Result, SernError};
use crate::geometry::Region;
use crate::model::{Metric, Model};
use crate::nodegen::NodeStore;
use crate::rng::RngState;

pub const DEFAULT_BINS: usize = 64;

/// Fixed-width histogram of edge lengths over `[0, longest]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthHistogram {
    pub longest: f64,
    pub counts: Vec<u64>,
}

impl LengthHistogram {
    pub fn new(bins: usize, longest: f64) -> Self {
        LengthHistogram {
            longest,
            counts: vec![0; bins.max(1)],
        }
    }

    #[inline]
    pub fn bin(&self, d: f64) -> usize {
        let bins = self.counts.len();
        let k = if self.longest > 0.0 && self.longest.is_finite() {
            (d / self.longest * bins as f64) as usize
        } else {
            0
        };
        k.min(bins - 1)
    }

    #[inline]
    pub fn add(&mut self, d: f64) {
        let k = self.bin(d);
        self.counts[k] += 1;
    }

    pub fn merge(&mut self, other: &LengthHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: u64,
    pub e: u64,
    pub mean_degree: f64,
    pub max_degree: u64,
    /// `degree_histogram[k]` nodes have degree `k`.
    pub degree_histogram: Vec<u64>,
    pub lengths: LengthHistogram,
}

impl GraphStats {
    pub fn from_degrees(degrees: impl IntoIterator<Item = u64>, lengths: LengthHistogram) -> Self {
        let mut n = 0u64;
        let mut sum = 0u64;
        let mut hist: Vec<u64> = Vec::new();
        for d in degrees {
            n += 1;
            sum += d;
            let k = d as usize;
            if k >= hist.len() {
                hist.resize(k + 1, 0);
            }
            hist[k] += 1;
        }
        GraphStats {
            n,
            e: sum / 2,
            mean_degree: if n == 0 { 0.0 } else { sum as f64 / n as f64 },
            max_degree: hist.len().saturating_sub(1) as u64,
            degree_histogram: hist,
            lengths,
        }
    }

    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "nodes: {}", self.n);
        let _ = writeln!(s, "edges: {}", self.e);
        let _ = writeln!(s, "mean_degree: {}", self.mean_degree);
        let _ = writeln!(s, "max_degree: {}", self.max_degree);
        let _ = writeln!(s, "degree_histogram: {}", join(&self.degree_histogram));
        let _ = writeln!(s, "length_max: {}", self.lengths.longest);
        let _ = writeln!(s, "length_histogram: {}", join(&self.lengths.counts));
        s
    }
}

/// Exact degrees from the edge list, lengths from stored distances when
/// present and recomputed otherwise.
pub fn compute_stats(nodes: &NodeStore, edges: &EdgeStore, model: &Model, bins: usize) -> Result<GraphStats> {
    let n = nodes.len();
    let mut degrees = vec![0u64; n];
    let mut lengths = LengthHistogram::new(bins, model.longest());
    let stored = edges.distances();
    for (k, (a, b)) in edges.pairs().enumerate() {
        let (a, b) = (a as usize, b as usize);
        if a >= n || b >= n {
            return Err(SernError::Integrity(format!(
                "edge {k} ({a}, {b}) refers to a node outside 0..{n}"
            )));
        }
        degrees[a] += 1;
        degrees[b] += 1;
        let d = match stored {
            Some(ds) => ds[k] as f64,
            None => model.distance(nodes.point(a), nodes.point(b)),
        };
        lengths.add(d);
    }
    Ok(GraphStats::from_degrees(degrees, lengths))
}

/// Monte Carlo estimate of `G(s) = E[exp(-s d)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaplaceEstimate {
    pub s: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Uniform point in `region` by rejection from its bounding rectangle.
pub fn sample_point(region: &Region, rng: &mut RngState) -> [f64; 2] {
    let b = region.bounds();
    loop {
        let p = [
            b.x0 + rng.next_uniform() * b.width(),
            b.y0 + rng.next_uniform() * b.height(),
        ];
        if region.contains(p) {
            return p;
        }
    }
}

pub fn estimate_gtilde(region: &Region, metric: &Metric, s: f64, samples: u64, rng: &mut RngState) -> LaplaceEstimate {
    let samples = samples.max(1);
    // Welford keeps s = 0 exact: every term is 1 and the variance stays 0.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        let a = sample_point(region, rng);
        let b = sample_point(region, rng);
        let v = (-s * metric.distance(a, b)).exp();
        let delta = v - mean;
        mean += delta / k as f64;
        m2 += delta * (v - mean);
    }
    let var = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    LaplaceEstimate {
        s,
        estimate: mean,
        std_error: (var / samples as f64).sqrt(),
        samples,
    }
}

/// `(n - 1) q G`.
pub fn expected_degree(n: u64, q: f64, gtilde: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (n - 1) as f64 * q * gtilde
}

/// `n (n - 1) q G / 2`.
pub fn expected_edges(n: u64, q: f64, gtilde: f64) -> f64 {
    n as f64 * expected_degree(n, q, gtilde) / 2.0
}

/// Expected hits of the `p = q` jump process, `n (n - 1) q / 2`.
pub fn expected_hits(n: u64, q: f64) -> f64 {
    expected_edges(n, q, 1.0)
}

/// The `q` giving mean degree `kbar`.
pub fn solve_q(n: u64, kbar: f64, gtilde: f64) -> Result<f64> {
    if n <= 1 || gtilde <= 0.0 {
        return Err(SernError::param("mean degree cannot be reached"));
    }
    let q = kbar / ((n - 1) as f64 * gtilde);
    if !(0.0..=1.0).contains(&q) {
        return Err(SernError::param(format!(
            "mean degree {kbar} needs q = {q}, outside [0, 1]"
        )));
    }
    Ok(q)
}
