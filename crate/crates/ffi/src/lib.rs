//! C interface to the generator.
//!
//! Configuration and results live behind opaque handles. Every fallible call
//! returns a [`SernStatus`]; on failure [`sern_last_error`] describes the
//! problem for the calling thread. Results can be read in place from a
//! [`SernGraph`] or copied once into buffers obtained from a caller-supplied
//! allocator, which lets a host runtime own the memory.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use sern::config::{parse_model, parse_region};
use sern::model::MODEL_NAMES;
use sern::{Algorithm, Deterrence, EdgeStore, GenConfig, GenStats, Generator, Metric, ModelParams, NodeStore, SernError};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SernStatus {
    Ok = 0,
    Parameter = 1,
    Integrity = 2,
    Resource = 3,
    Format = 4,
    Io = 5,
    NullPointer = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: &SernError) -> SernStatus {
    set_error(&e.to_string());
    match e {
        SernError::Parameter(_) => SernStatus::Parameter,
        SernError::Integrity(_) => SernStatus::Integrity,
        SernError::Resource(_) => SernStatus::Resource,
        SernError::Format(_) => SernStatus::Format,
        SernError::Io(_) => SernStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SernError>) -> SernStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SernStatus::Ok,
        Ok(Err(e)) => fail(&e),
        Err(_) => {
            set_error("internal panic");
            SernStatus::Panic
        }
    }
}

fn null_handle() -> SernStatus {
    set_error("null pointer argument");
    SernStatus::NullPointer
}

fn null() -> SernError {
    SernError::Parameter("null pointer argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, SernError> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| SernError::Parameter("string is not valid UTF-8".into()))
}

/// Link probability callback: `p(d, context)`. It may be called from several
/// threads at once.
pub type SernProbabilityFn = Option<unsafe extern "C" fn(distance: f64, context: *mut c_void) -> f64>;

struct Callback {
    f: unsafe extern "C" fn(f64, *mut c_void) -> f64,
    context: *mut c_void,
}

// SAFETY: the caller promises the callback and its context are thread-safe.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

enum ModelChoice {
    Named(String),
    Custom(Arc<Callback>),
}

/// Opaque generation settings.
pub struct SernConfig {
    n: u64,
    model: ModelChoice,
    params: ModelParams,
    metric: Metric,
    region: sern::Region,
    buckets: usize,
    algorithm: Algorithm,
    threads: usize,
    buffer: usize,
    seed: u64,
    distances: bool,
}

impl SernConfig {
    fn to_gen_config(&self) -> Result<GenConfig, SernError> {
        let deterrence = match &self.model {
            ModelChoice::Named(name) => parse_model(name, &self.params)?,
            ModelChoice::Custom(cb) => {
                let cb = Arc::clone(cb);
                // SAFETY: the callback was supplied non-null by the caller.
                Deterrence::Custom(Arc::new(move |d: f64| unsafe { (cb.f)(d, cb.context) }))
            }
        };
        let mut c = GenConfig::new(self.n, deterrence);
        c.metric = self.metric.clone();
        c.region = self.region.clone();
        c.buckets = self.buckets;
        c.algorithm = self.algorithm;
        c.threads = self.threads;
        c.buffer = self.buffer;
        c.seed = self.seed;
        c.distances = self.distances;
        Ok(c)
    }
}

/// Opaque generated graph.
pub struct SernGraph {
    nodes: NodeStore,
    edges: EdgeStore,
    stats: GenStats,
}

/// Run summary.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SernStats {
    pub nodes: u64,
    pub edges: u64,
    pub hits: u64,
    pub placement_rejections: u64,
    pub tasks: u64,
    pub skipped_tasks: u64,
    pub node_seconds: f64,
    pub edge_seconds: f64,
    pub total_seconds: f64,
    pub payload_bytes: u64,
    pub overhead_bytes: u64,
}

impl From<&GenStats> for SernStats {
    fn from(s: &GenStats) -> Self {
        SernStats {
            nodes: s.nodes,
            edges: s.edges,
            hits: s.hits,
            placement_rejections: s.placement_rejections,
            tasks: s.tasks,
            skipped_tasks: s.skipped_tasks,
            node_seconds: s.node_seconds,
            edge_seconds: s.edge_seconds,
            total_seconds: s.total_seconds,
            payload_bytes: s.memory.payload_bytes() as u64,
            overhead_bytes: s.memory.overhead_bytes() as u64,
        }
    }
}

/// Host allocation hook: returns `bytes` bytes aligned to `align`, or null.
pub type SernAllocFn = Option<unsafe extern "C" fn(bytes: usize, align: usize, context: *mut c_void) -> *mut c_void>;

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SernAllocator {
    pub alloc: SernAllocFn,
    pub context: *mut c_void,
}

/// Arrays filled by [`sern_generate_into`]. Pointers are null for empty
/// arrays and `distances` is null when distances were not requested.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SernArrays {
    pub n: u64,
    pub e: u64,
    pub xs: *mut f32,
    pub ys: *mut f32,
    pub from: *mut u32,
    pub to: *mut u32,
    pub distances: *mut f32,
    pub stats: SernStats,
}

/// Message for the last failed call on this thread; never null.
#[no_mangle]
pub extern "C" fn sern_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sern_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with the command-line defaults and no nodes.
#[no_mangle]
pub extern "C" fn sern_config_new() -> *mut SernConfig {
    let d = GenConfig::new(0, Deterrence::Ger { q: 1.0 });
    Box::into_raw(Box::new(SernConfig {
        n: 0,
        model: ModelChoice::Named("waxman".into()),
        params: ModelParams::default(),
        metric: d.metric,
        region: d.region,
        buckets: d.buckets,
        algorithm: d.algorithm,
        threads: d.threads,
        buffer: d.buffer,
        seed: d.seed,
        distances: d.distances,
    }))
}

/// # Safety
/// `config` must come from [`sern_config_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sern_config_free(config: *mut SernConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn with_config(config: *mut SernConfig, f: impl FnOnce(&mut SernConfig) -> Result<(), SernError>) -> SernStatus {
    if config.is_null() {
        return null_handle();
    }
    guard(|| f(&mut *config))
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_nodes(config: *mut SernConfig, n: u64) -> SernStatus {
    with_config(config, |c| {
        c.n = n;
        Ok(())
    })
}

/// Selects a named model; its parameters are taken at generation time.
///
/// # Safety
/// `config` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_model(config: *mut SernConfig, name: *const c_char) -> SernStatus {
    with_config(config, |c| {
        let name = text(name)?.replace('_', "-").to_ascii_lowercase();
        if !MODEL_NAMES.contains(&name.as_str()) {
            return Err(SernError::Parameter(format!("unknown model '{name}'")));
        }
        c.model = ModelChoice::Named(name);
        Ok(())
    })
}

/// Sets `q`, `s`, `r`, `theta1` or `theta2`.
///
/// # Safety
/// `config` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_param(config: *mut SernConfig, key: *const c_char, value: f64) -> SernStatus {
    with_config(config, |c| {
        match text(key)? {
            "q" => c.params.q = value,
            "s" => c.params.s = value,
            "r" => c.params.r = Some(value),
            "theta1" => c.params.theta1 = value,
            "theta2" => c.params.theta2 = value,
            other => return Err(SernError::Parameter(format!("unknown parameter '{other}'"))),
        }
        Ok(())
    })
}

/// Uses `p(d)` from a callback. Generation falls back to the quadratic
/// algorithm unless the callback is non-increasing in distance.
///
/// # Safety
/// `config` must be a live handle; `f` and `context` must stay valid and be
/// callable from any thread until the configuration is freed.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_custom_model(
    config: *mut SernConfig,
    f: SernProbabilityFn,
    context: *mut c_void,
) -> SernStatus {
    with_config(config, |c| {
        let f = f.ok_or_else(null)?;
        c.model = ModelChoice::Custom(Arc::new(Callback { f, context }));
        Ok(())
    })
}

/// `l2`, `l1`, `l0` or `linf`.
///
/// # Safety
/// `config` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_metric(config: *mut SernConfig, name: *const c_char) -> SernStatus {
    with_config(config, |c| {
        c.metric = Metric::parse(text(name)?)?;
        Ok(())
    })
}

/// `rect:W,H`, `ellipse:A,B` or `polygon:PATH`.
///
/// # Safety
/// `config` must be a live handle and `spec` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_region(config: *mut SernConfig, spec: *const c_char) -> SernStatus {
    with_config(config, |c| {
        c.region = parse_region(text(spec)?)?;
        Ok(())
    })
}

/// `naive`, `qjump` or `bucket`.
///
/// # Safety
/// `config` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_algorithm(config: *mut SernConfig, name: *const c_char) -> SernStatus {
    with_config(config, |c| {
        c.algorithm = text(name)?.parse()?;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_buckets(config: *mut SernConfig, m: usize) -> SernStatus {
    with_config(config, |c| {
        c.buckets = m;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_threads(config: *mut SernConfig, threads: usize) -> SernStatus {
    with_config(config, |c| {
        c.threads = threads;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_buffer(config: *mut SernConfig, edges: usize) -> SernStatus {
    with_config(config, |c| {
        c.buffer = edges;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_seed(config: *mut SernConfig, seed: u64) -> SernStatus {
    with_config(config, |c| {
        c.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sern_config_set_distances(config: *mut SernConfig, enabled: bool) -> SernStatus {
    with_config(config, |c| {
        c.distances = enabled;
        Ok(())
    })
}

fn run(config: &SernConfig) -> Result<SernGraph, SernError> {
    let graph = Generator::new(config.to_gen_config()?)?.generate()?;
    Ok(SernGraph {
        nodes: graph.nodes,
        edges: graph.edges,
        stats: graph.stats,
    })
}

/// Generates a graph owned by the library; release it with [`sern_graph_free`].
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sern_generate(config: *const SernConfig, out: *mut *mut SernGraph) -> SernStatus {
    if config.is_null() || out.is_null() {
        return null_handle();
    }
    *out = ptr::null_mut();
    guard(|| {
        *out = Box::into_raw(Box::new(run(&*config)?));
        Ok(())
    })
}

unsafe fn host_copy<T: Copy>(alloc: &SernAllocator, data: &[T]) -> Result<*mut T, SernError> {
    if data.is_empty() {
        return Ok(ptr::null_mut());
    }
    let f = alloc.alloc.ok_or_else(null)?;
    let bytes = std::mem::size_of_val(data);
    let p = f(bytes, std::mem::align_of::<T>(), alloc.context) as *mut T;
    if p.is_null() {
        return Err(SernError::Resource(format!("host allocator refused {bytes} bytes")));
    }
    if !(p as usize).is_multiple_of(std::mem::align_of::<T>()) {
        return Err(SernError::Resource("host allocator returned a misaligned block".into()));
    }
    ptr::copy_nonoverlapping(data.as_ptr(), p, data.len());
    Ok(p)
}

/// Generates a graph and copies its arrays into memory obtained from
/// `allocator`. Blocks allocated before a failure are not released.
///
/// # Safety
/// `config` must be a live handle, `allocator` and `out` valid pointers,
/// and the allocator must return blocks of at least the requested size.
#[no_mangle]
pub unsafe extern "C" fn sern_generate_into(
    config: *const SernConfig,
    allocator: *const SernAllocator,
    out: *mut SernArrays,
) -> SernStatus {
    if config.is_null() || allocator.is_null() || out.is_null() {
        return null_handle();
    }
    guard(|| {
        let g = run(&*config)?;
        let a = &*allocator;
        let arrays = SernArrays {
            n: g.nodes.len() as u64,
            e: g.edges.len() as u64,
            xs: host_copy(a, g.nodes.xs())?,
            ys: host_copy(a, g.nodes.ys())?,
            from: host_copy(a, g.edges.from_ids())?,
            to: host_copy(a, g.edges.to_ids())?,
            distances: match g.edges.distances() {
                Some(d) => host_copy(a, d)?,
                None => ptr::null_mut(),
            },
            stats: SernStats::from(&g.stats),
        };
        *out = arrays;
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`sern_generate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_free(graph: *mut SernGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_node_count(graph: *const SernGraph) -> u64 {
    graph.as_ref().map_or(0, |g| g.nodes.len() as u64)
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_edge_count(graph: *const SernGraph) -> u64 {
    graph.as_ref().map_or(0, |g| g.edges.len() as u64)
}

/// Node x coordinates, `sern_graph_node_count` entries, valid while the graph lives.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_xs(graph: *const SernGraph) -> *const f32 {
    graph.as_ref().map_or(ptr::null(), |g| g.nodes.xs().as_ptr())
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_ys(graph: *const SernGraph) -> *const f32 {
    graph.as_ref().map_or(ptr::null(), |g| g.nodes.ys().as_ptr())
}

/// Lower endpoint of each edge.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_from(graph: *const SernGraph) -> *const u32 {
    graph.as_ref().map_or(ptr::null(), |g| g.edges.from_ids().as_ptr())
}

/// Higher endpoint of each edge.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_to(graph: *const SernGraph) -> *const u32 {
    graph.as_ref().map_or(ptr::null(), |g| g.edges.to_ids().as_ptr())
}

/// Edge lengths, or null when they were not requested.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_distances(graph: *const SernGraph) -> *const f32 {
    graph
        .as_ref()
        .and_then(|g| g.edges.distances())
        .map_or(ptr::null(), <[f32]>::as_ptr)
}

/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sern_graph_stats(graph: *const SernGraph, out: *mut SernStats) -> SernStatus {
    match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => {
            *out = SernStats::from(&g.stats);
            SernStatus::Ok
        }
        _ => null_handle(),
    }
}
