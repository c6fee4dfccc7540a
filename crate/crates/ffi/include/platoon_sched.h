#ifndef PLATOON_SCHED_H
#define PLATOON_SCHED_H

/* Generated by cbindgen from the Rust sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Algorithm selector for `ps_decide`.
 */
typedef enum PsAlgorithm {
  /**
   * Pick by topology: greedy for the two-lane merge, the merge DP for
   * wider merges, the phase DP for the crossing.
   */
  PS_ALGORITHM_AUTO = 0,
  PS_ALGORITHM_GREEDY = 1,
  PS_ALGORITHM_MERGE_DP = 2,
  PS_ALGORITHM_CROSSING_DP = 3,
} PsAlgorithm;

/**
 * Outcome of an FFI call. `Ok`, `Infeasible`, `InvalidSchedule`, and
 * `NoPartition` are ordinary results; everything else is an error with
 * details available from `ps_last_error`.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  /**
   * No schedule within the requested delay bound.
   */
  PS_STATUS_INFEASIBLE = 1,
  /**
   * The schedule violates a validity condition.
   */
  PS_STATUS_INVALID_SCHEDULE = 2,
  /**
   * The multiset admits no equal-sum split (or the schedule's delay
   * exceeds the reduction threshold, certifying nothing).
   */
  PS_STATUS_NO_PARTITION = 3,
  PS_STATUS_NULL_ARGUMENT = 4,
  PS_STATUS_INVALID_ARGUMENT = 5,
  PS_STATUS_PARSE_ERROR = 6,
  /**
   * The requested procedure does not apply to this topology.
   */
  PS_STATUS_UNSUPPORTED = 7,
  /**
   * A work cap (state space or admission orders) was exceeded.
   */
  PS_STATUS_CAP_EXCEEDED = 8,
  PS_STATUS_INTERNAL_ERROR = 9,
} PsStatus;

/**
 * Search strategy for `ps_solve`.
 */
typedef enum PsStrategy {
  PS_STRATEGY_HYBRID = 0,
  PS_STRATEGY_BISECT = 1,
  PS_STRATEGY_COMPARISON = 2,
} PsStrategy;

/**
 * Topology selector for `ps_instance_generate`. Pass `k = 0` for the
 * kinds that take no lane count.
 */
typedef enum PsTopologyKind {
  PS_TOPOLOGY_KIND_Y_MERGE = 0,
  PS_TOPOLOGY_KIND_K_MERGE = 1,
  PS_TOPOLOGY_KIND_TWO_WAY_CROSSING = 2,
  PS_TOPOLOGY_KIND_MULTI_CROSS = 3,
} PsTopologyKind;

/**
 * Opaque scheduling problem handle.
 */
typedef struct PsInstance PsInstance;

/**
 * Opaque schedule handle.
 */
typedef struct PsSchedule PsSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the current thread's most recent non-`Ok` status, or null.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *ps_last_error(void);

/**
 * Parses an instance from its JSON format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PsStatus ps_instance_from_json(const char *json, struct PsInstance **out);

/**
 * Serializes an instance to its canonical JSON format.
 *
 * # Safety
 * `inst` must be a live handle from this library; `out` must be valid.
 */
enum PsStatus ps_instance_to_json(const struct PsInstance *inst, char **out);

/**
 * Deterministically generates a random instance. `k` is required
 * (non-zero) for `KMerge` and `MultiCross` and must be zero otherwise.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PsStatus ps_instance_generate(enum PsTopologyKind kind,
                                   uint32_t k,
                                   uint32_t n,
                                   uint64_t seed,
                                   int64_t max_release,
                                   int64_t max_length,
                                   struct PsInstance **out);

/**
 * Releases an instance handle. Null is ignored.
 *
 * # Safety
 * `inst` must have been returned by this library and not yet freed.
 */
void ps_instance_free(struct PsInstance *inst);

/**
 * Parses a schedule from its JSON format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PsStatus ps_schedule_from_json(const char *json, struct PsSchedule **out);

/**
 * Serializes a schedule to its JSON format.
 *
 * # Safety
 * `sched` must be a live handle from this library; `out` must be valid.
 */
enum PsStatus ps_schedule_to_json(const struct PsSchedule *sched, char **out);

/**
 * Releases a schedule handle. Null is ignored.
 *
 * # Safety
 * `sched` must have been returned by this library and not yet freed.
 */
void ps_schedule_free(struct PsSchedule *sched);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have been returned by this library and not yet freed.
 */
void ps_string_free(char *s);

/**
 * Tests whether a schedule with delay at most `delay` exists. On `Ok`,
 * `schedule_out` (if non-null) receives a witness schedule.
 *
 * # Safety
 * `inst` must be a live handle; `schedule_out` may be null.
 */
enum PsStatus ps_decide(const struct PsInstance *inst,
                        int64_t delay,
                        enum PsAlgorithm algorithm,
                        struct PsSchedule **schedule_out);

/**
 * Computes the minimum achievable delay. On `Ok`, writes it to
 * `d_star_out` and (if non-null) a witness schedule to `schedule_out`.
 *
 * # Safety
 * `inst` must be a live handle; `d_star_out` must be valid;
 * `schedule_out` may be null.
 */
enum PsStatus ps_solve(const struct PsInstance *inst,
                       enum PsStrategy strategy,
                       int64_t *d_star_out,
                       struct PsSchedule **schedule_out);

/**
 * Brute-forces the exact optimum over all admission orders, refusing
 * above `max_orders` interleavings. Works on every topology.
 *
 * # Safety
 * `inst` must be a live handle; `d_star_out` must be valid;
 * `schedule_out` may be null.
 */
enum PsStatus ps_oracle(const struct PsInstance *inst,
                        uint64_t max_orders,
                        int64_t *d_star_out,
                        struct PsSchedule **schedule_out);

/**
 * Validates a schedule. Returns `Ok` and writes the maximum delay when
 * valid; returns `InvalidSchedule` with the violations described by
 * `ps_last_error` otherwise.
 *
 * # Safety
 * `inst` and `sched` must be live handles; `max_delay_out` may be null.
 */
enum PsStatus ps_validate(const struct PsInstance *inst,
                          const struct PsSchedule *sched,
                          int64_t *max_delay_out);

/**
 * Builds the hard combined-intersection instance for a multiset of
 * positive integers. Returns `NoPartition` without an instance when the
 * total is odd.
 *
 * # Safety
 * `entries` must point to `len` readable values; `out` must be valid.
 */
enum PsStatus ps_reduce_partition(const int64_t *entries, size_t len, struct PsInstance **out);

/**
 * Recovers an equal-sum split from a schedule for a reduced instance,
 * as a JSON object `{"u": [...], "v": [...]}`. Returns `NoPartition`
 * when the schedule's delay exceeds the reduction threshold.
 *
 * # Safety
 * `inst` and `sched` must be live handles; `json_out` must be valid.
 */
enum PsStatus ps_extract_partition(const struct PsInstance *inst,
                                   const struct PsSchedule *sched,
                                   char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLATOON_SCHED_H */
