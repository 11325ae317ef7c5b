//! Uniform node placement into bucket-contiguous storage.
//!
//! Per-bucket counts are drawn once from `Mult(n, P)`, which fixes every
//! bucket's slice of the coordinate arrays before any point is generated.
//! Each bucket is then filled by rejection from its cell with its own
//! random stream, so filling parallelizes without coordination and the
//! result does not depend on the number of workers.

use std::ops::Range;
use std::thread;

use crate::error::{Result, SernError};
use crate::geometry::{BucketGrid, Region};
use crate::rng::{streams, RngState};

/// Exclusive upper bound on node counts; ids are 32-bit.
pub const MAX_NODES: u64 = 1 << 32;

const MAX_CONSECUTIVE_REJECTIONS: u64 = 100_000_000;

/// Node coordinates grouped by bucket. The node id is the array index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeStore {
    xs: Vec<f32>,
    ys: Vec<f32>,
    counts: Vec<u32>,
    offsets: Vec<u32>,
}

impl NodeStore {
    /// Wraps plain coordinate arrays as a single bucket.
    pub fn from_coordinates(xs: Vec<f32>, ys: Vec<f32>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(SernError::Integrity(format!(
                "{} x coordinates but {} y coordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() as u64 >= MAX_NODES {
            return Err(SernError::param("node count must be below 2^32"));
        }
        let n = xs.len() as u32;
        Ok(NodeStore {
            xs,
            ys,
            counts: vec![n],
            offsets: vec![0],
        })
    }

    /// Groups given points by the grid bucket containing them.
    ///
    /// Points are stably reordered into bucket order; the second return value
    /// maps each new id to the index of the point in `points`.
    pub fn bucketed(grid: &BucketGrid, points: &[[f32; 2]]) -> Result<(Self, Vec<u32>)> {
        if points.len() as u64 >= MAX_NODES {
            return Err(SernError::param("node count must be below 2^32"));
        }
        let cells: Vec<usize> = points
            .iter()
            .map(|p| grid.cell_of([p[0] as f64, p[1] as f64]))
            .collect();
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        order.sort_by_key(|&i| cells[i as usize]);
        let mut counts = vec![0u32; grid.len()];
        for &c in &cells {
            counts[c] += 1;
        }
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0u32;
        for &c in &counts {
            offsets.push(acc);
            acc += c;
        }
        let xs = order.iter().map(|&i| points[i as usize][0]).collect();
        let ys = order.iter().map(|&i| points[i as usize][1]).collect();
        Ok((
            NodeStore {
                xs,
                ys,
                counts,
                offsets,
            },
            order,
        ))
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f32] {
        &self.xs
    }

    pub fn ys(&self) -> &[f32] {
        &self.ys
    }

    #[inline(always)]
    pub fn point(&self, id: usize) -> [f64; 2] {
        [self.xs[id] as f64, self.ys[id] as f64]
    }

    pub fn bucket_len(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn bucket_range(&self, bucket: usize) -> Range<usize> {
        let start = self.offsets[bucket] as usize;
        start..start + self.counts[bucket] as usize
    }

    /// Coordinate bytes: 8 per node.
    pub fn payload_bytes(&self) -> usize {
        (self.xs.len() + self.ys.len()) * 4
    }

    /// Bucket directory bytes.
    pub fn directory_bytes(&self) -> usize {
        (self.counts.capacity() + self.offsets.capacity()) * 4
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlacementStats {
    pub candidates: u64,
    pub rejections: u64,
}

/// Per-bucket node counts drawn from `Mult(n, P_{I,J})` in linear order.
pub fn allocate_counts(grid: &BucketGrid, n: u64, rng: &mut RngState) -> Result<Vec<u32>> {
    if n >= MAX_NODES {
        return Err(SernError::param(format!("{n} nodes exceeds the 2^32 limit")));
    }
    let counts = rng.multinomial(n, grid.probabilities())?;
    Ok(counts.into_iter().map(|c| c as u32).collect())
}

// Smallest f32 >= lo and largest f32 <= hi.
fn f32_bounds(lo: f64, hi: f64) -> (f32, f32) {
    let mut a = lo as f32;
    if (a as f64) < lo {
        a = a.next_up();
    }
    let mut b = hi as f32;
    if (b as f64) > hi {
        b = b.next_down();
    }
    (a, b)
}

/// Writes `xs.len()` points uniform on the cell intersected with the region.
///
/// Returns the number of candidates drawn.
pub fn fill_bucket(
    region: &Region,
    grid: &BucketGrid,
    bucket: usize,
    xs: &mut [f32],
    ys: &mut [f32],
    rng: &mut RngState,
) -> Result<u64> {
    debug_assert_eq!(xs.len(), ys.len());
    let cell = grid.cell_rect(bucket);
    let (lx, hx) = f32_bounds(cell.x0, cell.x1);
    let (ly, hy) = f32_bounds(cell.y0, cell.y1);
    let (w, h) = (cell.width(), cell.height());
    let interior = grid.is_interior(bucket);
    let mut candidates = 0;
    for (x, y) in xs.iter_mut().zip(ys.iter_mut()) {
        let mut misses = 0;
        loop {
            candidates += 1;
            let cx = ((cell.x0 + rng.next_uniform() * w) as f32).clamp(lx, hx);
            let cy = ((cell.y0 + rng.next_uniform() * h) as f32).clamp(ly, hy);
            if interior || region.contains([cx as f64, cy as f64]) {
                *x = cx;
                *y = cy;
                break;
            }
            misses += 1;
            if misses == MAX_CONSECUTIVE_REJECTIONS {
                return Err(SernError::Resource(format!(
                    "bucket {bucket}: no candidate accepted after {misses} draws"
                )));
            }
        }
    }
    Ok(candidates)
}

/// Places `n` nodes uniformly over `region`.
pub fn generate_nodes(
    region: &Region,
    grid: &BucketGrid,
    n: u64,
    seed: u64,
    threads: usize,
) -> Result<(NodeStore, PlacementStats)> {
    let mut alloc_rng = RngState::derive(seed, streams::NODE_ALLOCATION, 0);
    let counts = allocate_counts(grid, n, &mut alloc_rng)?;
    let mut offsets = Vec::with_capacity(counts.len());
    let mut acc = 0u32;
    for &c in &counts {
        offsets.push(acc);
        acc += c;
    }
    let len = n as usize;
    let mut xs = vec![0f32; len];
    let mut ys = vec![0f32; len];

    let parts = partition(&counts, threads.max(1));
    let candidates = if parts.len() <= 1 {
        fill_range(region, grid, 0..counts.len(), &counts, &mut xs, &mut ys, seed)?
    } else {
        thread::scope(|scope| -> Result<u64> {
            let mut handles = Vec::with_capacity(parts.len());
            let (mut rest_x, mut rest_y) = (&mut xs[..], &mut ys[..]);
            for buckets in parts {
                let size: usize = counts[buckets.clone()].iter().map(|&c| c as usize).sum();
                let (chunk_x, tail_x) = rest_x.split_at_mut(size);
                let (chunk_y, tail_y) = rest_y.split_at_mut(size);
                rest_x = tail_x;
                rest_y = tail_y;
                let counts = &counts;
                handles.push(scope.spawn(move || {
                    fill_range(region, grid, buckets, counts, chunk_x, chunk_y, seed)
                }));
            }
            let mut total = 0;
            for h in handles {
                total += h.join().expect("node worker panicked")?;
            }
            Ok(total)
        })?
    };

    let stats = PlacementStats {
        candidates,
        rejections: candidates - n,
    };
    Ok((
        NodeStore {
            xs,
            ys,
            counts,
            offsets,
        },
        stats,
    ))
}

fn fill_range(
    region: &Region,
    grid: &BucketGrid,
    buckets: Range<usize>,
    counts: &[u32],
    xs: &mut [f32],
    ys: &mut [f32],
    seed: u64,
) -> Result<u64> {
    let mut start = 0;
    let mut candidates = 0;
    for b in buckets {
        let c = counts[b] as usize;
        if c == 0 {
            continue;
        }
        let mut rng = RngState::derive(seed, streams::NODE_FILL, b as u64);
        candidates += fill_bucket(
            region,
            grid,
            b,
            &mut xs[start..start + c],
            &mut ys[start..start + c],
            &mut rng,
        )?;
        start += c;
    }
    Ok(candidates)
}

// Contiguous bucket ranges with roughly equal node totals.
fn partition(counts: &[u32], parts: usize) -> Vec<Range<usize>> {
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    if parts <= 1 || total < 4096 {
        return std::iter::once(0..counts.len()).collect();
    }
    let target = total.div_ceil(parts as u64);
    let mut ranges = Vec::with_capacity(parts);
    let (mut start, mut acc) = (0, 0u64);
    for (b, &c) in counts.iter().enumerate() {
        acc += c as u64;
        if acc >= target && ranges.len() + 1 < parts {
            ranges.push(start..b + 1);
            start = b + 1;
            acc = 0;
        }
    }
    ranges.push(start..counts.len());
    ranges
}
