//! Edge generation: the quadratic reference algorithm, geometric jumping
//! over the global pair space, and geometric jumping per bucket pair.
//!
//! All three produce the same distribution: conditional on the nodes, each
//! pair `i < j` is linked independently with probability `p(d_ij)`. The
//! jumping variants enumerate the hits of an upper-bound Bernoulli process
//! and thin each hit with probability `p(d) / bound`.

mod decode;

pub use decode::{decode_pair_cross, decode_pair_same, decode_upper_triangle};

use crate::error::{Result, SernError};
use crate::geometry::BucketGrid;
use crate::model::{Model, QTable};
use crate::nodegen::NodeStore;
use crate::rng::{GeometricSkip, RngState};

/// Node count above which the quadratic algorithm refuses to run unless forced.
pub const NAIVE_NODE_LIMIT: usize = 100_000;

/// Destination for accepted edges.
pub trait EdgeSink {
    fn push(&mut self, from: u32, to: u32, distance: f32);
}

/// Undirected edges as parallel `from < to` arrays, optionally with lengths.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeStore {
    from: Vec<u32>,
    to: Vec<u32>,
    distances: Option<Vec<f32>>,
}

impl EdgeStore {
    pub fn new(with_distances: bool) -> Self {
        EdgeStore::with_capacity(0, with_distances)
    }

    pub fn with_capacity(capacity: usize, with_distances: bool) -> Self {
        EdgeStore {
            from: Vec::with_capacity(capacity),
            to: Vec::with_capacity(capacity),
            distances: with_distances.then(|| Vec::with_capacity(capacity)),
        }
    }

    pub fn from_parts(from: Vec<u32>, to: Vec<u32>, distances: Option<Vec<f32>>) -> Result<Self> {
        if from.len() != to.len() || distances.as_ref().is_some_and(|d| d.len() != from.len()) {
            return Err(SernError::Integrity("edge arrays differ in length".into()));
        }
        Ok(EdgeStore { from, to, distances })
    }

    pub fn into_parts(self) -> (Vec<u32>, Vec<u32>, Option<Vec<f32>>) {
        (self.from, self.to, self.distances)
    }

    pub fn len(&self) -> usize {
        self.from.len()
    }

    pub fn is_empty(&self) -> bool {
        self.from.is_empty()
    }

    pub fn from_ids(&self) -> &[u32] {
        &self.from
    }

    pub fn to_ids(&self) -> &[u32] {
        &self.to
    }

    pub fn distances(&self) -> Option<&[f32]> {
        self.distances.as_deref()
    }

    pub fn has_distances(&self) -> bool {
        self.distances.is_some()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.from.iter().copied().zip(self.to.iter().copied())
    }

    /// Edge pairs in ascending order.
    pub fn sorted_pairs(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<_> = self.pairs().collect();
        v.sort_unstable();
        v
    }

    /// 8 bytes per edge, 12 with distances.
    pub fn payload_bytes(&self) -> usize {
        self.len() * if self.has_distances() { 12 } else { 8 }
    }

    pub fn clear(&mut self) {
        self.from.clear();
        self.to.clear();
        if let Some(d) = &mut self.distances {
            d.clear();
        }
    }

    /// Allocated bytes, including unused capacity.
    pub fn allocated_bytes(&self) -> usize {
        (self.from.capacity() + self.to.capacity()) * 4
            + self.distances.as_ref().map_or(0, |d| d.capacity() * 4)
    }

    pub fn shrink_to_fit(&mut self) {
        self.from.shrink_to_fit();
        self.to.shrink_to_fit();
        if let Some(d) = &mut self.distances {
            d.shrink_to_fit();
        }
    }

    /// Checks `from < to < n` and that no pair repeats.
    pub fn check_structure(&self, n: usize) -> Result<()> {
        for (k, (a, b)) in self.pairs().enumerate() {
            if a >= b {
                return Err(SernError::Integrity(format!("edge {k} is ({a}, {b}), expected from < to")));
            }
            if b as usize >= n {
                return Err(SernError::Integrity(format!("edge {k} refers to node {b} of {n}")));
            }
        }
        let sorted = self.sorted_pairs();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(SernError::Integrity(format!("duplicate edge {:?}", w[0])));
        }
        Ok(())
    }
}

impl EdgeSink for EdgeStore {
    #[inline(always)]
    fn push(&mut self, from: u32, to: u32, distance: f32) {
        self.from.push(from);
        self.to.push(to);
        if let Some(d) = &mut self.distances {
            d.push(distance);
        }
    }
}

/// Work counters for one edge-generation run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct EdgeCounters {
    /// Candidate pairs examined: every pair for the quadratic algorithm,
    /// geometric hits otherwise.
    pub hits: u64,
    pub accepted: u64,
    /// Bucket-pair tasks run, including skipped ones.
    pub tasks: u64,
    /// Bucket-pair tasks skipped because their bound is zero.
    pub skipped_tasks: u64,
    pub draws: u64,
}

impl EdgeCounters {
    pub fn merge(&mut self, other: &EdgeCounters) {
        self.hits += other.hits;
        self.accepted += other.accepted;
        self.tasks += other.tasks;
        self.skipped_tasks += other.skipped_tasks;
        self.draws += other.draws;
    }
}

/// Bernoulli trial over every pair `i < j`.
pub fn generate_edges_naive<S: EdgeSink>(
    nodes: &NodeStore,
    model: &Model,
    rng: &mut RngState,
    sink: &mut S,
    allow_large: bool,
) -> Result<EdgeCounters> {
    let n = nodes.len();
    if n > NAIVE_NODE_LIMIT && !allow_large {
        return Err(SernError::param(format!(
            "quadratic algorithm refused for {n} nodes (limit {NAIVE_NODE_LIMIT})"
        )));
    }
    let start_draws = rng.draws();
    let mut c = EdgeCounters::default();
    for i in 0..n {
        let pi = nodes.point(i);
        for j in (i + 1)..n {
            let d = model.distance(pi, nodes.point(j));
            c.hits += 1;
            if rng.next_open_closed() <= model.probability(d) {
                sink.push(i as u32, j as u32, d as f32);
                c.accepted += 1;
            }
        }
    }
    c.draws = rng.draws() - start_draws;
    Ok(c)
}

/// Jumps over the `n(n-1)/2` pair space with success probability `sup p`.
pub fn generate_edges_qjump<S: EdgeSink>(
    nodes: &NodeStore,
    model: &Model,
    rng: &mut RngState,
    sink: &mut S,
) -> EdgeCounters {
    let start_draws = rng.draws();
    let mut c = EdgeCounters::default();
    let n = nodes.len() as u64;
    let p_max = model.max_probability();
    if p_max > 0.0 && n >= 2 {
        let total = n * (n - 1) / 2;
        let skip = GeometricSkip::new(p_max).expect("bound in (0, 1]");
        let mut k = skip.sample(rng);
        while k < total {
            let (i, j) = decode_pair_same(k);
            c.hits += 1;
            let d = model.distance(nodes.point(i as usize), nodes.point(j as usize));
            if thin(rng, model.probability(d), p_max) {
                sink.push(i as u32, j as u32, d as f32);
                c.accepted += 1;
            }
            k = match k.checked_add(1 + skip.sample(rng)) {
                Some(next) => next,
                None => break,
            };
        }
    }
    c.draws = rng.draws() - start_draws;
    c
}

// Accept a hit of the bound-`q` process with probability p / q.
#[inline(always)]
fn thin(rng: &mut RngState, p: f64, q: f64) -> bool {
    p >= q || rng.next_open_closed() * q <= p
}

/// One bucket pair of the bucket algorithm; `first <= second` in linear order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BucketPairTask {
    pub first: usize,
    pub second: usize,
    /// Size of the pair space.
    pub pairs: u64,
    /// Upper bound on the link probability for any pair in the task.
    pub bound: f64,
}

impl BucketPairTask {
    pub fn new(nodes: &NodeStore, grid: &BucketGrid, q: &QTable, first: usize, second: usize) -> Self {
        let c1 = nodes.counts()[first] as u64;
        let c2 = nodes.counts()[second] as u64;
        let pairs = if first == second {
            c1 * c1.saturating_sub(1) / 2
        } else {
            c1 * c2
        };
        let (col1, row1) = grid.coords(first);
        let (col2, row2) = grid.coords(second);
        BucketPairTask {
            first,
            second,
            pairs,
            bound: q.get(col1.abs_diff(col2), row1.abs_diff(row2)),
        }
    }
}

/// Runs one bucket-pair task. Tasks with a zero bound draw nothing.
pub fn run_bucket_pair<S: EdgeSink>(
    task: &BucketPairTask,
    nodes: &NodeStore,
    model: &Model,
    rng: &mut RngState,
    sink: &mut S,
    counters: &mut EdgeCounters,
) {
    counters.tasks += 1;
    if task.bound <= 0.0 || task.pairs == 0 {
        counters.skipped_tasks += 1;
        return;
    }
    let start_draws = rng.draws();
    let skip = GeometricSkip::new(task.bound).expect("bound in (0, 1]");
    let q = task.bound;
    let base1 = nodes.offsets()[task.first] as u64;
    let mut k = skip.sample(rng);
    // Same-bucket and cross-bucket pairs get separate loops so the decode
    // choice is not re-made per hit.
    if task.first == task.second {
        while k < task.pairs {
            let (li, lj) = decode_pair_same(k);
            let (i, j) = ((base1 + li) as usize, (base1 + lj) as usize);
            counters.hits += 1;
            let d = model.distance(nodes.point(i), nodes.point(j));
            if thin(rng, model.probability(d), q) {
                sink.push(i as u32, j as u32, d as f32);
                counters.accepted += 1;
            }
            k = match k.checked_add(1 + skip.sample(rng)) {
                Some(next) => next,
                None => break,
            };
        }
    } else {
        let base2 = nodes.offsets()[task.second] as u64;
        let c1 = nodes.counts()[task.first] as u64;
        while k < task.pairs {
            let (li, lj) = decode_pair_cross(k, c1);
            let (i, j) = ((base1 + li) as usize, (base2 + lj) as usize);
            counters.hits += 1;
            let d = model.distance(nodes.point(i), nodes.point(j));
            if thin(rng, model.probability(d), q) {
                sink.push(i as u32, j as u32, d as f32);
                counters.accepted += 1;
            }
            k = match k.checked_add(1 + skip.sample(rng)) {
                Some(next) => next,
                None => break,
            };
        }
    }
    counters.draws += rng.draws() - start_draws;
}

/// Indices of buckets holding at least one node.
pub fn occupied_buckets(nodes: &NodeStore) -> Vec<usize> {
    (0..nodes.bucket_len()).filter(|&b| nodes.counts()[b] > 0).collect()
}

/// Sequential bucket algorithm over all pairs of occupied buckets, row-major,
/// drawing from a single stream.
pub fn generate_edges_bucket<S: EdgeSink>(
    nodes: &NodeStore,
    grid: &BucketGrid,
    model: &Model,
    q: &QTable,
    rng: &mut RngState,
    sink: &mut S,
) -> EdgeCounters {
    let mut c = EdgeCounters::default();
    let occupied = occupied_buckets(nodes);
    for (a, &first) in occupied.iter().enumerate() {
        for &second in &occupied[a..] {
            let task = BucketPairTask::new(nodes, grid, q, first, second);
            run_bucket_pair(&task, nodes, model, rng, sink, &mut c);
        }
    }
    c
}
