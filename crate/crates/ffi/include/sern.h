#ifndef SERN_H
#define SERN_H

/* Generated by cbindgen from the sern-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  SERN_STATUS_OK = 0,
  SERN_STATUS_PARAMETER = 1,
  SERN_STATUS_INTEGRITY = 2,
  SERN_STATUS_RESOURCE = 3,
  SERN_STATUS_FORMAT = 4,
  SERN_STATUS_IO = 5,
  SERN_STATUS_NULL_POINTER = 6,
  SERN_STATUS_PANIC = 7,
} SernStatus;

/**
 * Opaque generation settings.
 */
typedef struct SernConfig SernConfig;

/**
 * Opaque generated graph.
 */
typedef struct SernGraph SernGraph;

/**
 * Link probability callback: `p(d, context)`. It may be called from several
 * threads at once.
 */
typedef double (*SernProbabilityFn)(double distance, void *context);

/**
 * Host allocation hook: returns `bytes` bytes aligned to `align`, or null.
 */
typedef void *(*SernAllocFn)(size_t bytes, size_t align, void *context);

typedef struct {
  SernAllocFn alloc;
  void *context;
} SernAllocator;

/**
 * Run summary.
 */
typedef struct {
  uint64_t nodes;
  uint64_t edges;
  uint64_t hits;
  uint64_t placement_rejections;
  uint64_t tasks;
  uint64_t skipped_tasks;
  double node_seconds;
  double edge_seconds;
  double total_seconds;
  uint64_t payload_bytes;
  uint64_t overhead_bytes;
} SernStats;

/**
 * Arrays filled by [`sern_generate_into`]. Pointers are null for empty
 * arrays and `distances` is null when distances were not requested.
 */
typedef struct {
  uint64_t n;
  uint64_t e;
  float *xs;
  float *ys;
  uint32_t *from;
  uint32_t *to;
  float *distances;
  SernStats stats;
} SernArrays;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; never null.
 */
const char *sern_last_error(void);

/**
 * Library version, a static string.
 */
const char *sern_version(void);

/**
 * New configuration with the command-line defaults and no nodes.
 */
SernConfig *sern_config_new(void);

/**
 * # Safety
 * `config` must come from [`sern_config_new`] and not be used afterwards.
 */
void sern_config_free(SernConfig *config);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_nodes(SernConfig *config, uint64_t n);

/**
 * Selects a named model; its parameters are taken at generation time.
 *
 * # Safety
 * `config` must be a live handle and `name` a NUL-terminated string.
 */
SernStatus sern_config_set_model(SernConfig *config, const char *name);

/**
 * Sets `q`, `s`, `r`, `theta1` or `theta2`.
 *
 * # Safety
 * `config` must be a live handle and `key` a NUL-terminated string.
 */
SernStatus sern_config_set_param(SernConfig *config, const char *key, double value);

/**
 * Uses `p(d)` from a callback. Generation falls back to the quadratic
 * algorithm unless the callback is non-increasing in distance.
 *
 * # Safety
 * `config` must be a live handle; `f` and `context` must stay valid and be
 * callable from any thread until the configuration is freed.
 */
SernStatus sern_config_set_custom_model(SernConfig *config, SernProbabilityFn f, void *context);

/**
 * `l2`, `l1`, `l0` or `linf`.
 *
 * # Safety
 * `config` must be a live handle and `name` a NUL-terminated string.
 */
SernStatus sern_config_set_metric(SernConfig *config, const char *name);

/**
 * `rect:W,H`, `ellipse:A,B` or `polygon:PATH`.
 *
 * # Safety
 * `config` must be a live handle and `spec` a NUL-terminated string.
 */
SernStatus sern_config_set_region(SernConfig *config, const char *spec);

/**
 * `naive`, `qjump` or `bucket`.
 *
 * # Safety
 * `config` must be a live handle and `name` a NUL-terminated string.
 */
SernStatus sern_config_set_algorithm(SernConfig *config, const char *name);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_buckets(SernConfig *config, size_t m);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_threads(SernConfig *config, size_t threads);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_buffer(SernConfig *config, size_t edges);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_seed(SernConfig *config, uint64_t seed);

/**
 * # Safety
 * `config` must be a live handle.
 */
SernStatus sern_config_set_distances(SernConfig *config, bool enabled);

/**
 * Generates a graph owned by the library; release it with [`sern_graph_free`].
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
SernStatus sern_generate(const SernConfig *config, SernGraph **out);

/**
 * Generates a graph and copies its arrays into memory obtained from
 * `allocator`. Blocks allocated before a failure are not released.
 *
 * # Safety
 * `config` must be a live handle, `allocator` and `out` valid pointers,
 * and the allocator must return blocks of at least the requested size.
 */
SernStatus sern_generate_into(const SernConfig *config,
                              const SernAllocator *allocator,
                              SernArrays *out);

/**
 * # Safety
 * `graph` must come from [`sern_generate`] and not be used afterwards.
 */
void sern_graph_free(SernGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
uint64_t sern_graph_node_count(const SernGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
uint64_t sern_graph_edge_count(const SernGraph *graph);

/**
 * Node x coordinates, `sern_graph_node_count` entries, valid while the graph lives.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
const float *sern_graph_xs(const SernGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
const float *sern_graph_ys(const SernGraph *graph);

/**
 * Lower endpoint of each edge.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
const uint32_t *sern_graph_from(const SernGraph *graph);

/**
 * Higher endpoint of each edge.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
const uint32_t *sern_graph_to(const SernGraph *graph);

/**
 * Edge lengths, or null when they were not requested.
 *
 * # Safety
 * `graph` must be a live handle or null.
 */
const float *sern_graph_distances(const SernGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
SernStatus sern_graph_stats(const SernGraph *graph, SernStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SERN_H */
