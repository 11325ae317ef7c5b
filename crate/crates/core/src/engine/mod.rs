//! End-to-end generation: node placement, then edges with the configured
//! algorithm, assembled into one contiguous edge store.
//!
//! The bucket algorithm runs one task per pair of occupied buckets. Task `t`
//! draws from its own stream derived from the seed and `t`, so the edge set
//! depends only on the seed and the nodes; the worker count changes the
//! order of edges in the store but not which edges are present. The
//! quadratic and global-jump algorithms are sequential.

mod sink;

pub use sink::SharedEdgeSink;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering};
use std::thread;
use std::time::Instant;

use log::{debug, warn};
use serde::Serialize;

use crate::analysis::{GraphStats, LengthHistogram};
use crate::edgegen::{
    decode_upper_triangle, generate_edges_naive, generate_edges_qjump, occupied_buckets, run_bucket_pair,
    BucketPairTask, EdgeCounters, EdgeSink, EdgeStore, NAIVE_NODE_LIMIT,
};
use crate::error::{Result, SernError};
use crate::geometry::{BucketGrid, Region};
use crate::model::{BoundKind, Deterrence, Metric, Model, QTable};
use crate::nodegen::{generate_nodes, NodeStore, PlacementStats, MAX_NODES};
use crate::rng::{streams, RngState};

pub const DEFAULT_BUCKETS: usize = 20;
pub const DEFAULT_BUFFER: usize = 1 << 14;
/// Upper limit on grid cells, to keep the Q table and directories small.
pub const MAX_GRID_CELLS: usize = 1 << 24;

const PILOT_SAMPLES: usize = 4096;
const CAPACITY_SLACK: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    QJump,
    Bucket,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::QJump => "qjump",
            Algorithm::Bucket => "bucket",
        }
    }
}

impl FromStr for Algorithm {
    type Err = SernError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Algorithm::Naive),
            "qjump" | "q-jump" => Ok(Algorithm::QJump),
            "bucket" => Ok(Algorithm::Bucket),
            other => Err(SernError::param(format!(
                "unknown algorithm '{other}', expected naive, qjump or bucket"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub n: u64,
    pub deterrence: Deterrence,
    pub metric: Metric,
    pub region: Region,
    /// Grid size `M`: cells along the longer side of the bounding rectangle.
    pub buckets: usize,
    pub algorithm: Algorithm,
    pub threads: usize,
    /// Edges per worker buffer.
    pub buffer: usize,
    pub seed: u64,
    pub distances: bool,
    /// Lets the quadratic algorithm run above [`NAIVE_NODE_LIMIT`] nodes.
    pub allow_large_naive: bool,
}

impl GenConfig {
    /// Defaults: unit square, Euclidean metric, `M = 20`, bucket algorithm,
    /// one worker, 16384-edge buffers, seed 0, no distances.
    pub fn new(n: u64, deterrence: Deterrence) -> Self {
        GenConfig {
            n,
            deterrence,
            metric: Metric::Euclidean,
            region: Region::unit_square(),
            buckets: DEFAULT_BUCKETS,
            algorithm: Algorithm::Bucket,
            threads: 1,
            buffer: DEFAULT_BUFFER,
            seed: 0,
            distances: false,
            allow_large_naive: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n >= MAX_NODES {
            return Err(SernError::param(format!("{} nodes exceeds the 2^32 limit", self.n)));
        }
        if self.buckets == 0 {
            return Err(SernError::param("grid size M must be at least 1"));
        }
        if self.buckets.saturating_mul(self.buckets) > MAX_GRID_CELLS {
            return Err(SernError::param(format!("grid size M = {} is too large", self.buckets)));
        }
        if self.threads == 0 {
            return Err(SernError::param("worker count must be at least 1"));
        }
        if self.buffer == 0 {
            return Err(SernError::param("buffer capacity must be at least 1"));
        }
        self.deterrence.validate()?;
        if self.algorithm == Algorithm::Naive {
            self.check_naive_size()?;
        }
        Ok(())
    }

    fn check_naive_size(&self) -> Result<()> {
        if self.n > NAIVE_NODE_LIMIT as u64 && !self.allow_large_naive {
            return Err(SernError::param(format!(
                "quadratic algorithm refused for {} nodes (limit {NAIVE_NODE_LIMIT})",
                self.n
            )));
        }
        Ok(())
    }
}

/// Byte accounting for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MemoryReport {
    /// Coordinates, 8 bytes per node.
    pub node_bytes: usize,
    /// Edge arrays after trimming, 8 bytes per edge or 12 with distances.
    pub edge_bytes: usize,
    pub directory_bytes: usize,
    pub grid_bytes: usize,
    pub qtable_bytes: usize,
    /// Worker flush buffers.
    pub buffer_bytes: usize,
    /// Largest edge allocation during generation.
    pub peak_edge_bytes: usize,
}

impl MemoryReport {
    pub fn payload_bytes(&self) -> usize {
        self.node_bytes + self.edge_bytes
    }

    /// Everything besides the graph payload that scales with `M` or `T B`.
    pub fn overhead_bytes(&self) -> usize {
        self.directory_bytes + self.grid_bytes + self.qtable_bytes + self.buffer_bytes
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GenStats {
    pub nodes: u64,
    pub edges: u64,
    pub algorithm: Option<Algorithm>,
    pub threads: usize,
    pub seed: u64,
    pub placement_candidates: u64,
    pub placement_rejections: u64,
    /// Pairs examined by the edge phase (geometric hits for jumping algorithms).
    pub hits: u64,
    pub tasks: u64,
    pub skipped_tasks: u64,
    pub edge_draws: u64,
    pub growth_events: u64,
    pub node_seconds: f64,
    pub edge_seconds: f64,
    pub total_seconds: f64,
    pub memory: MemoryReport,
}

impl GenStats {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let alg = self.algorithm.map_or("none", Algorithm::name);
        let m = &self.memory;
        format!(
            "nodes: {}\nedges: {}\nalgorithm: {alg}\nthreads: {}\nseed: {}\n\
             placement_candidates: {}\nplacement_rejections: {}\nhits: {}\ntasks: {}\n\
             skipped_tasks: {}\nedge_draws: {}\ngrowth_events: {}\nnode_seconds: {:.6}\n\
             edge_seconds: {:.6}\ntotal_seconds: {:.6}\npayload_bytes: {}\noverhead_bytes: {}\n\
             peak_edge_bytes: {}\n",
            self.nodes,
            self.edges,
            self.threads,
            self.seed,
            self.placement_candidates,
            self.placement_rejections,
            self.hits,
            self.tasks,
            self.skipped_tasks,
            self.edge_draws,
            self.growth_events,
            self.node_seconds,
            self.edge_seconds,
            self.total_seconds,
            m.payload_bytes(),
            m.overhead_bytes(),
            m.peak_edge_bytes,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    pub nodes: NodeStore,
    pub edges: EdgeStore,
    pub stats: GenStats,
}

/// Result of statistics-only generation.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRun {
    pub nodes: NodeStore,
    pub graph: GraphStats,
    pub stats: GenStats,
}

/// Edge-phase outcome for a given node store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeRun {
    pub counters: EdgeCounters,
    pub growth_events: u64,
    /// Largest edge capacity allocated, in edges.
    pub peak_capacity: usize,
    pub buffer_bytes: usize,
}

/// One-shot generation.
pub fn generate(config: &GenConfig) -> Result<Graph> {
    Generator::new(config.clone())?.generate()
}

/// Prepared grid, model and Q table for repeated generation.
pub struct Generator {
    config: GenConfig,
    algorithm: Algorithm,
    model: Model,
    grid: BucketGrid,
    qtable: QTable,
}

trait WorkerSink: EdgeSink + Send {
    fn finish(&mut self) -> Result<()>;
}

impl WorkerSink for EdgeStore {
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

struct BufferedSink<'a> {
    buffer: EdgeStore,
    capacity: usize,
    shared: &'a SharedEdgeSink,
    abort: &'a AtomicBool,
    error: Option<SernError>,
}

impl BufferedSink<'_> {
    fn flush(&mut self) {
        if self.error.is_none() {
            if let Err(e) = self.shared.reserve_and_commit(&self.buffer) {
                self.abort.store(true, Ordering::Relaxed);
                self.error = Some(e);
            }
        }
        self.buffer.clear();
    }
}

impl EdgeSink for BufferedSink<'_> {
    #[inline(always)]
    fn push(&mut self, from: u32, to: u32, distance: f32) {
        self.buffer.push(from, to, distance);
        if self.buffer.len() == self.capacity {
            self.flush();
        }
    }
}

impl WorkerSink for BufferedSink<'_> {
    fn finish(&mut self) -> Result<()> {
        self.flush();
        self.error.take().map_or(Ok(()), Err)
    }
}

struct StatsSink<'a> {
    degrees: &'a [AtomicU32],
    lengths: LengthHistogram,
}

impl EdgeSink for StatsSink<'_> {
    #[inline(always)]
    fn push(&mut self, from: u32, to: u32, distance: f32) {
        self.degrees[from as usize].fetch_add(1, Ordering::Relaxed);
        self.degrees[to as usize].fetch_add(1, Ordering::Relaxed);
        self.lengths.add(distance as f64);
    }
}

impl WorkerSink for StatsSink<'_> {
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl Generator {
    /// Validates the configuration and builds the grid and Q table.
    pub fn new(config: GenConfig) -> Result<Self> {
        config.validate()?;
        let model = Model::new(config.metric.clone(), config.deterrence.clone(), &config.region)?;
        let mut algorithm = config.algorithm;
        if algorithm != Algorithm::Naive && model.bound_kind() == BoundKind::Unbounded {
            warn!("link probability is not non-increasing in distance; using the quadratic algorithm");
            config.check_naive_size()?;
            algorithm = Algorithm::Naive;
        }
        let grid = BucketGrid::new(&config.region, config.buckets)?;
        let qtable = QTable::build(&model, &grid);
        Ok(Generator {
            config,
            algorithm,
            model,
            grid,
            qtable,
        })
    }

    pub fn config(&self) -> &GenConfig {
        &self.config
    }

    /// The algorithm actually used, after any fallback.
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn grid(&self) -> &BucketGrid {
        &self.grid
    }

    pub fn qtable(&self) -> &QTable {
        &self.qtable
    }

    pub fn generate(&self) -> Result<Graph> {
        self.generate_seeded(self.config.seed)
    }

    pub fn generate_seeded(&self, seed: u64) -> Result<Graph> {
        let start = Instant::now();
        let (nodes, placement) = self.place_nodes(seed)?;
        let node_seconds = start.elapsed().as_secs_f64();
        let edge_start = Instant::now();
        let (edges, run) = self.generate_edges(&nodes, seed)?;
        let edge_seconds = edge_start.elapsed().as_secs_f64();
        let width = if self.config.distances { 12 } else { 8 };
        let mut stats = self.base_stats(seed, &nodes, &placement, &run);
        stats.edges = edges.len() as u64;
        stats.node_seconds = node_seconds;
        stats.edge_seconds = edge_seconds;
        stats.total_seconds = start.elapsed().as_secs_f64();
        stats.memory.edge_bytes = edges.payload_bytes();
        stats.memory.peak_edge_bytes = run.peak_capacity.max(edges.len()) * width;
        debug!("generated {} nodes and {} edges", stats.nodes, stats.edges);
        Ok(Graph { nodes, edges, stats })
    }

    /// Generation that keeps only degree and edge-length statistics.
    pub fn generate_stats(&self, seed: u64, bins: usize) -> Result<StatsRun> {
        let start = Instant::now();
        let (nodes, placement) = self.place_nodes(seed)?;
        let node_seconds = start.elapsed().as_secs_f64();
        let edge_start = Instant::now();
        let degrees: Vec<AtomicU32> = (0..nodes.len()).map(|_| AtomicU32::new(0)).collect();
        let longest = self.model.longest();
        let (sinks, counters) = self.drive(&nodes, seed, || StatsSink {
            degrees: &degrees,
            lengths: LengthHistogram::new(bins, longest),
        })?;
        let mut lengths = LengthHistogram::new(bins, longest);
        for s in &sinks {
            lengths.merge(&s.lengths);
        }
        drop(sinks);
        let graph = GraphStats::from_degrees(degrees.into_iter().map(|d| d.into_inner() as u64), lengths);
        let run = EdgeRun {
            counters,
            ..EdgeRun::default()
        };
        let mut stats = self.base_stats(seed, &nodes, &placement, &run);
        stats.edges = graph.e;
        stats.node_seconds = node_seconds;
        stats.edge_seconds = edge_start.elapsed().as_secs_f64();
        stats.total_seconds = start.elapsed().as_secs_f64();
        Ok(StatsRun { nodes, graph, stats })
    }

    fn base_stats(&self, seed: u64, nodes: &NodeStore, placement: &PlacementStats, run: &EdgeRun) -> GenStats {
        GenStats {
            nodes: nodes.len() as u64,
            edges: 0,
            algorithm: Some(self.algorithm),
            threads: self.config.threads,
            seed,
            placement_candidates: placement.candidates,
            placement_rejections: placement.rejections,
            hits: run.counters.hits,
            tasks: run.counters.tasks,
            skipped_tasks: run.counters.skipped_tasks,
            edge_draws: run.counters.draws,
            growth_events: run.growth_events,
            node_seconds: 0.0,
            edge_seconds: 0.0,
            total_seconds: 0.0,
            memory: MemoryReport {
                node_bytes: nodes.payload_bytes(),
                edge_bytes: 0,
                directory_bytes: nodes.directory_bytes(),
                grid_bytes: self.grid.heap_bytes(),
                qtable_bytes: self.qtable.heap_bytes(),
                buffer_bytes: run.buffer_bytes,
                peak_edge_bytes: 0,
            },
        }
    }

    pub fn place_nodes(&self, seed: u64) -> Result<(NodeStore, PlacementStats)> {
        generate_nodes(&self.config.region, &self.grid, self.config.n, seed, self.config.threads)
    }

    /// Edges for a node store laid out on this generator's grid.
    pub fn generate_edges(&self, nodes: &NodeStore, seed: u64) -> Result<(EdgeStore, EdgeRun)> {
        let distances = self.config.distances;
        let capacity = self.estimate_capacity(nodes, seed);
        if !self.parallel(nodes) {
            let mut store = EdgeStore::new(distances);
            reserve_store(&mut store, capacity, distances)?;
            let (mut sinks, counters) = self.drive(nodes, seed, || std::mem::take(&mut store))?;
            let mut store = sinks.pop().unwrap_or_default();
            let peak = edge_capacity(&store).max(capacity);
            store.shrink_to_fit();
            return Ok((
                store,
                EdgeRun {
                    counters,
                    growth_events: 0,
                    peak_capacity: peak,
                    buffer_bytes: 0,
                },
            ));
        }
        let shared = SharedEdgeSink::with_capacity(capacity, distances)?;
        let abort = AtomicBool::new(false);
        let buffer = self.config.buffer;
        let (sinks, counters) = self.drive(nodes, seed, || BufferedSink {
            buffer: EdgeStore::with_capacity(buffer, distances),
            capacity: buffer,
            shared: &shared,
            abort: &abort,
            error: None,
        })?;
        let buffer_bytes = sinks.iter().map(|s| s.buffer.allocated_bytes()).sum();
        drop(sinks);
        let growth_events = shared.growth_events();
        let peak_capacity = shared.peak_capacity();
        Ok((
            shared.into_store(),
            EdgeRun {
                counters,
                growth_events,
                peak_capacity,
                buffer_bytes,
            },
        ))
    }

    fn parallel(&self, nodes: &NodeStore) -> bool {
        self.algorithm == Algorithm::Bucket && self.config.threads > 1 && nodes.len() > 1
    }

    /// Expected edge count from a pilot sample of node pairs, with slack.
    pub fn estimate_capacity(&self, nodes: &NodeStore, seed: u64) -> usize {
        let n = nodes.len();
        if n < 2 {
            return 0;
        }
        let pairs = n as f64 * (n - 1) as f64 / 2.0;
        let p = |i: usize, j: usize| self.model.probability(self.model.distance(nodes.point(i), nodes.point(j)));
        if pairs <= PILOT_SAMPLES as f64 {
            let exact: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| p(i, j)).sum();
            return (exact * CAPACITY_SLACK).ceil().min(pairs) as usize;
        }
        let mut rng = RngState::derive(seed, streams::CAPACITY_PILOT, 0);
        let mut sum = 0.0;
        for _ in 0..PILOT_SAMPLES {
            let i = (rng.next_uniform() * n as f64) as usize % n;
            let mut j = (rng.next_uniform() * (n - 1) as f64) as usize % (n - 1);
            if j >= i {
                j += 1;
            }
            sum += p(i, j);
        }
        let expected = pairs * sum / PILOT_SAMPLES as f64;
        let slack = if self.parallel(nodes) {
            (self.config.threads * self.config.buffer) as f64
        } else {
            0.0
        };
        (expected * CAPACITY_SLACK + slack).min(pairs).min(usize::MAX as f64 / 16.0).ceil() as usize
    }

    // Runs the edge phase, one sink per worker.
    fn drive<W, F>(&self, nodes: &NodeStore, seed: u64, mut make: F) -> Result<(Vec<W>, EdgeCounters)>
    where
        W: WorkerSink,
        F: FnMut() -> W,
    {
        match self.algorithm {
            Algorithm::Naive => {
                let mut rng = RngState::derive(seed, streams::EDGE_SEQUENTIAL, 0);
                let mut sink = make();
                let c = generate_edges_naive(nodes, &self.model, &mut rng, &mut sink, self.config.allow_large_naive)?;
                sink.finish()?;
                Ok((vec![sink], c))
            }
            Algorithm::QJump => {
                let mut rng = RngState::derive(seed, streams::EDGE_SEQUENTIAL, 0);
                let mut sink = make();
                let c = generate_edges_qjump(nodes, &self.model, &mut rng, &mut sink);
                sink.finish()?;
                Ok((vec![sink], c))
            }
            Algorithm::Bucket => self.drive_buckets(nodes, seed, make),
        }
    }

    fn drive_buckets<W, F>(&self, nodes: &NodeStore, seed: u64, mut make: F) -> Result<(Vec<W>, EdgeCounters)>
    where
        W: WorkerSink,
        F: FnMut() -> W,
    {
        if nodes.bucket_len() != self.grid.len() {
            return Err(SernError::param(format!(
                "node store has {} buckets but the grid has {}",
                nodes.bucket_len(),
                self.grid.len()
            )));
        }
        let occupied = occupied_buckets(nodes);
        let m = occupied.len() as u64;
        let total = m * (m + 1) / 2;
        let run_task = |t: u64, sink: &mut W, counters: &mut EdgeCounters| {
            let (a, b) = decode_upper_triangle(t, m);
            let task = BucketPairTask::new(nodes, &self.grid, &self.qtable, occupied[a as usize], occupied[b as usize]);
            let mut rng = RngState::derive(seed, streams::EDGE_TASK, t);
            run_bucket_pair(&task, nodes, &self.model, &mut rng, sink, counters);
        };

        let workers = self.config.threads.min(total.max(1) as usize);
        if workers <= 1 {
            let mut sink = make();
            let mut counters = EdgeCounters::default();
            for t in 0..total {
                run_task(t, &mut sink, &mut counters);
            }
            sink.finish()?;
            return Ok((vec![sink], counters));
        }

        let sinks: Vec<W> = (0..workers).map(|_| make()).collect();
        let next = AtomicU64::new(0);
        let failed = AtomicBool::new(false);
        let results: Vec<(W, EdgeCounters, Result<()>)> = thread::scope(|scope| {
            let handles: Vec<_> = sinks
                .into_iter()
                .map(|mut sink| {
                    let (next, failed, run_task) = (&next, &failed, &run_task);
                    scope.spawn(move || {
                        let mut counters = EdgeCounters::default();
                        loop {
                            if failed.load(Ordering::Relaxed) {
                                break;
                            }
                            let t = next.fetch_add(1, Ordering::Relaxed);
                            if t >= total {
                                break;
                            }
                            run_task(t, &mut sink, &mut counters);
                        }
                        let r = sink.finish();
                        if r.is_err() {
                            failed.store(true, Ordering::Relaxed);
                        }
                        (sink, counters, r)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("edge worker panicked"))
                .collect()
        });
        let mut counters = EdgeCounters::default();
        let mut out = Vec::with_capacity(results.len());
        for (sink, c, r) in results {
            r?;
            counters.merge(&c);
            out.push(sink);
        }
        Ok((out, counters))
    }
}

fn reserve_store(store: &mut EdgeStore, capacity: usize, distances: bool) -> Result<()> {
    let mut from = Vec::new();
    let mut to = Vec::new();
    let mut dist = distances.then(Vec::new);
    let err = |e| SernError::Resource(format!("edge storage for {capacity} edges: {e}"));
    from.try_reserve_exact(capacity).map_err(err)?;
    to.try_reserve_exact(capacity).map_err(err)?;
    if let Some(d) = &mut dist {
        d.try_reserve_exact(capacity).map_err(err)?;
    }
    *store = EdgeStore::from_parts(from, to, dist)?;
    Ok(())
}

fn edge_capacity(store: &EdgeStore) -> usize {
    let width = if store.has_distances() { 12 } else { 8 };
    store.allocated_bytes() / width
}
