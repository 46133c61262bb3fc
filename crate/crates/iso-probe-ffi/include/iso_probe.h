#ifndef ISO_PROBE_H
#define ISO_PROBE_H

/* Generated by cbindgen from the iso-probe-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of all fallible calls.
 */
typedef enum IsoProbeStatus {
  ISO_PROBE_STATUS_OK = 0,
  ISO_PROBE_STATUS_NULL_POINTER = 1,
  ISO_PROBE_STATUS_INVALID_UTF8 = 2,
  ISO_PROBE_STATUS_PARSE_ERROR = 3,
  ISO_PROBE_STATUS_INVALID_PARAMETER = 4,
  ISO_PROBE_STATUS_BUFFER_TOO_SMALL = 5,
  ISO_PROBE_STATUS_INTERNAL_ERROR = 6,
} IsoProbeStatus;

/**
 * Cell selection rule used by walks.
 */
typedef enum IsoProbeSelector {
  ISO_PROBE_SELECTOR_FIRST_LARGEST = 0,
  ISO_PROBE_SELECTOR_SMALLEST = 1,
} IsoProbeSelector;

/**
 * Verdict discriminant, mirroring the solver's four outcomes.
 */
typedef enum IsoProbeVerdictKind {
  ISO_PROBE_VERDICT_KIND_ISOMORPHIC = 0,
  ISO_PROBE_VERDICT_KIND_NON_ISOMORPHIC_CERTIFIED = 1,
  ISO_PROBE_VERDICT_KIND_PROBABLY_NON_ISOMORPHIC = 2,
  ISO_PROBE_VERDICT_KIND_INCONCLUSIVE = 3,
} IsoProbeVerdictKind;

/**
 * Opaque parsed graph.
 */
typedef struct IsoProbeGraph IsoProbeGraph;

/**
 * Opaque solver options; create with `iso_probe_options_new`.
 */
typedef struct IsoProbeOptions IsoProbeOptions;

/**
 * Opaque verdict of one solver run.
 */
typedef struct IsoProbeVerdict IsoProbeVerdict;

/**
 * Solver counters of one run.
 */
typedef struct IsoProbeStats {
  uint64_t walks;
  uint64_t nodes_visited;
  uint64_t leaves_full;
  uint64_t leaves_path_only;
  uint64_t leaves_fake;
  uint64_t automorphisms_found;
  uint32_t collisions;
  /**
   * 1 when the run sampled the unpruned trees at any point.
   */
  uint8_t full_phase_entered;
} IsoProbeStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a NUL-terminated DIMACS text into a new graph handle.
 *
 * # Safety
 * `text` must point to a NUL-terminated string and `out` to writable
 * storage for one pointer. On success `*out` owns the graph and must be
 * released with [`iso_probe_graph_free`].
 */
enum IsoProbeStatus iso_probe_graph_parse(const char *text, struct IsoProbeGraph **out);

/**
 * Releases a graph handle; `g` may be null.
 *
 * # Safety
 * `g` must be null or a pointer returned by this library, not yet freed.
 */
void iso_probe_graph_free(struct IsoProbeGraph *g);

/**
 * Vertex count; 0 for null handles.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uint64_t iso_probe_graph_vertex_count(const struct IsoProbeGraph *g);

/**
 * Edge count; 0 for null handles.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uint64_t iso_probe_graph_edge_count(const struct IsoProbeGraph *g);

/**
 * Serializes a graph to DIMACS. Writes at most `cap` bytes including the
 * terminating NUL and stores the required size (excluding NUL) in
 * `*needed`. Call with `buf == NULL` or a too-small `cap` to query the
 * size; that case returns `BufferTooSmall`.
 *
 * # Safety
 * `g` must be a live handle, `needed` writable, and `buf` must point to
 * `cap` writable bytes when non-null.
 */
enum IsoProbeStatus iso_probe_graph_to_dimacs(const struct IsoProbeGraph *g,
                                              char *buf,
                                              size_t cap,
                                              size_t *needed);

/**
 * New options handle with the stock configuration.
 */
struct IsoProbeOptions *iso_probe_options_new(void);

/**
 * Releases an options handle; `o` may be null.
 *
 * # Safety
 * `o` must be null or a pointer returned by `iso_probe_options_new`.
 */
void iso_probe_options_free(struct IsoProbeOptions *o);

/**
 * Sets the one-sided error bound; must lie in (0, 1).
 *
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_epsilon(struct IsoProbeOptions *o, double epsilon);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_seed(struct IsoProbeOptions *o, uint64_t seed);

/**
 * Sets the deviation extension (extra pops refined past a mismatch).
 *
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_deviation_extension(struct IsoProbeOptions *o,
                                                              uint32_t k);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_selector(struct IsoProbeOptions *o,
                                                   enum IsoProbeSelector selector);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_use_deviation_phase(struct IsoProbeOptions *o,
                                                              bool enabled);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_use_blueprint(struct IsoProbeOptions *o, bool enabled);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_full_leaf_budget(struct IsoProbeOptions *o,
                                                           uint64_t budget);

/**
 * # Safety
 * `o` must be a live options handle.
 */
enum IsoProbeStatus iso_probe_options_set_max_walks(struct IsoProbeOptions *o, uint64_t max_walks);

/**
 * Runs the solver on two graphs. `options` may be null for defaults. On
 * success `*out` owns the verdict and must be released with
 * [`iso_probe_verdict_free`].
 *
 * # Safety
 * `g1` and `g2` must be live graph handles, `options` null or a live
 * options handle, `out` writable.
 */
enum IsoProbeStatus iso_probe_test(const struct IsoProbeGraph *g1,
                                   const struct IsoProbeGraph *g2,
                                   const struct IsoProbeOptions *options,
                                   struct IsoProbeVerdict **out);

/**
 * Releases a verdict handle; `v` may be null.
 *
 * # Safety
 * `v` must be null or a pointer returned by `iso_probe_test`.
 */
void iso_probe_verdict_free(struct IsoProbeVerdict *v);

/**
 * The verdict discriminant; null handles read as `Inconclusive`.
 *
 * # Safety
 * `v` must be null or a live verdict handle.
 */
enum IsoProbeVerdictKind iso_probe_verdict_kind(const struct IsoProbeVerdict *v);

/**
 * The error bound of a probabilistic rejection; 0 for every other kind.
 *
 * # Safety
 * `v` must be null or a live verdict handle.
 */
double iso_probe_verdict_error_bound(const struct IsoProbeVerdict *v);

/**
 * Number of entries the witness needs; 0 unless the verdict is
 * `Isomorphic`.
 *
 * # Safety
 * `v` must be null or a live verdict handle.
 */
size_t iso_probe_verdict_witness_len(const struct IsoProbeVerdict *v);

/**
 * Copies the witness image array (0-based: vertex `i` of the first graph
 * maps to `buf[i]` in the second) into `buf`.
 *
 * # Safety
 * `v` must be a live verdict handle and `buf` must point to `cap`
 * writable `uint32_t` slots.
 */
enum IsoProbeStatus iso_probe_verdict_witness(const struct IsoProbeVerdict *v,
                                              uint32_t *buf,
                                              size_t cap);

/**
 * Copies the run counters into `*out`.
 *
 * # Safety
 * `v` must be a live verdict handle and `out` writable.
 */
enum IsoProbeStatus iso_probe_verdict_stats(const struct IsoProbeVerdict *v,
                                            struct IsoProbeStats *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t iso_probe_last_error(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISO_PROBE_H */
