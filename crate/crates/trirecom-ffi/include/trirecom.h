#ifndef TRIRECOM_H
#define TRIRECOM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TR_GRANULARITY_FLIP 0

#define TR_GRANULARITY_RECOM 1

#define TR_BALANCED 0

#define TR_NEARLY_BALANCED 1

#define TR_OUTSIDE 2

/**
 * Status codes returned by every fallible function.
 */
enum TrStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  TR_STATUS_OK = 0,
  TR_STATUS_NULL_POINTER = 1,
  TR_STATUS_INVALID_ARGUMENT = 2,
  TR_STATUS_OUTSIDE_STATE_SPACE = 3,
  TR_STATUS_PATH_FAILED = 4,
  TR_STATUS_VERIFY_FAILED = 5,
  TR_STATUS_BUFFER_TOO_SMALL = 6,
  TR_STATUS_PANIC = 7,
};
#ifndef __cplusplus
typedef int32_t TrStatus;
#endif // __cplusplus

/**
 * Opaque partition handle.
 */
typedef struct TrPartition TrPartition;

/**
 * Opaque trace handle.
 */
typedef struct TrTrace TrTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *tr_last_error(void);

/**
 * Build a partition of the side-`n` region from `len` labels (1, 2 or 3) in
 * vertex order, with size targets `k[0..3]`.
 *
 * # Safety
 * `k` must point to three values, `labels` to `len` values, and `out` must
 * be writable.
 */
TrStatus tr_partition_new(size_t n,
                          const size_t *k,
                          const uint8_t *labels,
                          size_t len,
                          struct TrPartition **out);

/**
 * The ground state whose blocks in vertex order are districts
 * `perm[0], perm[1], perm[2]`.
 *
 * # Safety
 * `k` and `perm` must point to three values each; `out` must be writable.
 */
TrStatus tr_partition_ground(size_t n,
                             const size_t *k,
                             const uint8_t *perm,
                             struct TrPartition **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void tr_partition_free(struct TrPartition *p);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t tr_partition_len(const struct TrPartition *p);

/**
 * Copy the labels into `buf`, which must hold the partition's length.
 *
 * # Safety
 * `p` must be a live handle and `buf` must point to `len` writable bytes.
 */
TrStatus tr_partition_labels(const struct TrPartition *p, uint8_t *buf, size_t len);

/**
 * One of `TR_BALANCED`, `TR_NEARLY_BALANCED`, `TR_OUTSIDE`, or -1 for a
 * null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
int32_t tr_partition_balance_class(const struct TrPartition *p);

/**
 * Build and verify a path from `from` to `to`.
 *
 * # Safety
 * `from` and `to` must be live handles and `out` writable.
 */
TrStatus tr_path(const struct TrPartition *from,
                 const struct TrPartition *to,
                 int32_t granularity,
                 struct TrTrace **out);

/**
 * An empty trace starting at `source`, for assembling steps by hand.
 *
 * # Safety
 * `source` must be a live handle and `out` writable.
 */
TrStatus tr_trace_new(const struct TrPartition *source, struct TrTrace **out);

/**
 * Append a step keeping district `untouched` fixed and ending at `labels`.
 * The step is not checked until [`tr_trace_verify`].
 *
 * # Safety
 * `t` must be a live handle and `labels` must point to `len` bytes.
 */
TrStatus tr_trace_push(struct TrTrace *t, uint8_t untouched, const uint8_t *labels, size_t len);

/**
 * # Safety
 * `t` must be null or a handle from this library not yet freed.
 */
void tr_trace_free(struct TrTrace *t);

/**
 * Number of steps, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t tr_trace_len(const struct TrTrace *t);

/**
 * Read step `index`: the kept district and the labels after the step.
 *
 * # Safety
 * `t` must be a live handle, `untouched` writable, and `buf` must point to
 * `len` writable bytes.
 */
TrStatus tr_trace_step(const struct TrTrace *t,
                       size_t index,
                       uint8_t *untouched,
                       uint8_t *buf,
                       size_t len);

/**
 * Re-check every step from scratch. On failure `failing_index` (if not
 * null) receives the index of the first bad step, or `SIZE_MAX` when the
 * source itself is outside the state space.
 *
 * # Safety
 * `t` must be a live handle; `failing_index` null or writable.
 */
TrStatus tr_trace_verify(const struct TrTrace *t, size_t *failing_index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIRECOM_H */
