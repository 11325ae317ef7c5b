//! Contiguous edge storage shared by worker threads.
//!
//! Workers fill private buffers and commit each full buffer as one
//! contiguous range. A commit claims its range by advancing an atomic cursor
//! with compare-and-swap while holding the read side of a lock, then copies
//! the buffer in. Growth takes the write side, which waits until every
//! in-flight copy has finished, so the prefix below the cursor is always
//! fully written when storage moves.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{PoisonError, RwLock};

use crate::edgegen::EdgeStore;
use crate::error::{Result, SernError};

const GROWTH_NUM: usize = 3;
const GROWTH_DEN: usize = 2;

struct Columns {
    from: Vec<u32>,
    to: Vec<u32>,
    dist: Option<Vec<f32>>,
    capacity: usize,
    // Taken while the lock was held exclusively; valid for `capacity` slots
    // until the next growth.
    from_ptr: *mut u32,
    to_ptr: *mut u32,
    dist_ptr: *mut f32,
}

// SAFETY: the raw pointers alias the vectors' heap buffers, which are only
// written through disjoint reserved ranges under the read lock and only
// reallocated under the write lock.
unsafe impl Send for Columns {}
unsafe impl Sync for Columns {}

impl Columns {
    fn refresh(&mut self) {
        self.from_ptr = self.from.as_mut_ptr();
        self.to_ptr = self.to.as_mut_ptr();
        self.dist_ptr = self
            .dist
            .as_mut()
            .map_or(std::ptr::null_mut(), |d| d.as_mut_ptr());
    }
}

fn reserve(v: &mut Vec<impl Copy>, total: usize) -> Result<()> {
    let extra = total.saturating_sub(v.len());
    v.try_reserve_exact(extra)
        .map_err(|e| SernError::Resource(format!("edge storage for {total} edges: {e}")))
}

pub struct SharedEdgeSink {
    columns: RwLock<Columns>,
    cursor: AtomicUsize,
    growths: AtomicU64,
    peak_capacity: AtomicUsize,
}

impl SharedEdgeSink {
    pub fn with_capacity(capacity: usize, distances: bool) -> Result<Self> {
        let mut cols = Columns {
            from: Vec::new(),
            to: Vec::new(),
            dist: distances.then(Vec::new),
            capacity,
            from_ptr: std::ptr::null_mut(),
            to_ptr: std::ptr::null_mut(),
            dist_ptr: std::ptr::null_mut(),
        };
        reserve(&mut cols.from, capacity)?;
        reserve(&mut cols.to, capacity)?;
        if let Some(d) = &mut cols.dist {
            reserve(d, capacity)?;
        }
        cols.refresh();
        Ok(SharedEdgeSink {
            columns: RwLock::new(cols),
            cursor: AtomicUsize::new(0),
            growths: AtomicU64::new(0),
            peak_capacity: AtomicUsize::new(capacity),
        })
    }

    /// Committed edges.
    pub fn len(&self) -> usize {
        self.cursor.load(Ordering::Acquire)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn capacity(&self) -> usize {
        self.columns.read().unwrap_or_else(PoisonError::into_inner).capacity
    }

    pub fn growth_events(&self) -> u64 {
        self.growths.load(Ordering::Relaxed)
    }

    pub fn peak_capacity(&self) -> usize {
        self.peak_capacity.load(Ordering::Relaxed)
    }

    /// Copies `batch` into one freshly reserved contiguous range.
    pub fn reserve_and_commit(&self, batch: &EdgeStore) -> Result<()> {
        let len = batch.len();
        if len == 0 {
            return Ok(());
        }
        loop {
            {
                let cols = self.columns.read().unwrap_or_else(PoisonError::into_inner);
                if cols.dist.is_some() != batch.has_distances() {
                    return Err(SernError::Integrity("batch and sink disagree on distances".into()));
                }
                let mut start = self.cursor.load(Ordering::Acquire);
                while start + len <= cols.capacity {
                    match self.cursor.compare_exchange_weak(
                        start,
                        start + len,
                        Ordering::AcqRel,
                        Ordering::Acquire,
                    ) {
                        Ok(_) => {
                            // SAFETY: [start, start + len) is below capacity and was
                            // claimed by this call alone; the buffers cannot move
                            // while the read guard is held.
                            unsafe {
                                std::ptr::copy_nonoverlapping(
                                    batch.from_ids().as_ptr(),
                                    cols.from_ptr.add(start),
                                    len,
                                );
                                std::ptr::copy_nonoverlapping(
                                    batch.to_ids().as_ptr(),
                                    cols.to_ptr.add(start),
                                    len,
                                );
                                if let Some(d) = batch.distances() {
                                    std::ptr::copy_nonoverlapping(d.as_ptr(), cols.dist_ptr.add(start), len);
                                }
                            }
                            return Ok(());
                        }
                        Err(now) => start = now,
                    }
                }
            }
            self.grow(len)?;
        }
    }

    fn grow(&self, needed: usize) -> Result<()> {
        let mut cols = self.columns.write().unwrap_or_else(PoisonError::into_inner);
        let used = self.cursor.load(Ordering::Acquire);
        if used + needed <= cols.capacity {
            return Ok(());
        }
        let target = (cols.capacity * GROWTH_NUM / GROWTH_DEN).max(used + needed).max(16);
        // SAFETY: holding the write lock means no commit is in flight, and
        // every range below the cursor was completely written by its owner.
        unsafe {
            cols.from.set_len(used);
            cols.to.set_len(used);
            if let Some(d) = &mut cols.dist {
                d.set_len(used);
            }
        }
        reserve(&mut cols.from, target)?;
        reserve(&mut cols.to, target)?;
        if let Some(d) = &mut cols.dist {
            reserve(d, target)?;
        }
        cols.capacity = target;
        cols.refresh();
        self.growths.fetch_add(1, Ordering::Relaxed);
        self.peak_capacity.fetch_max(target, Ordering::Relaxed);
        Ok(())
    }

    /// The committed edges, trimmed to size.
    pub fn into_store(self) -> EdgeStore {
        let used = self.cursor.into_inner();
        let mut cols = self.columns.into_inner().unwrap_or_else(PoisonError::into_inner);
        // SAFETY: with the sink consumed no commit can be in flight, and all
        // ranges below the cursor were written.
        unsafe {
            cols.from.set_len(used);
            cols.to.set_len(used);
            if let Some(d) = &mut cols.dist {
                d.set_len(used);
            }
        }
        let mut store = EdgeStore::from_parts(
            std::mem::take(&mut cols.from),
            std::mem::take(&mut cols.to),
            cols.dist.take(),
        )
        .expect("columns share one length");
        store.shrink_to_fit();
        store
    }
}
