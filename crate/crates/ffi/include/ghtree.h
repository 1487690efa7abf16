#ifndef GHTREE_H
#define GHTREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GhtStatus {
  GHT_STATUS_OK = 0,
  GHT_STATUS_NULL_POINTER = 1,
  GHT_STATUS_INVALID_UTF8 = 2,
  GHT_STATUS_PARSE_ERROR = 3,
  /**
   * Input rejected by a constructor (bad matrix, cycle, unknown vertex...).
   */
  GHT_STATUS_VALIDATION_ERROR = 4,
  GHT_STATUS_BUDGET_EXCEEDED = 5,
  /**
   * The output buffer is too small; the required length was written.
   */
  GHT_STATUS_BUFFER_TOO_SMALL = 6,
  GHT_STATUS_INVALID_ARGUMENT = 7,
  GHT_STATUS_PANIC = 8,
} GhtStatus;

/**
 * A finite metric space.
 */
typedef struct GhtSpace GhtSpace;

/**
 * A finite metric tree.
 */
typedef struct GhtTree GhtTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a space from an `n x n` row-major matrix. `labels` may be null
 * (points are then named `p0, p1, ...`) or point to `n` strings.
 *
 * # Safety
 * `matrix` must hold `n * n` doubles; `labels`, if not null, `n` valid C
 * strings; `out` must be writable.
 */
enum GhtStatus ght_space_new(const char *const *labels,
                             const double *matrix,
                             size_t n,
                             double eps,
                             struct GhtSpace **out);

/**
 * Builds a space from `{"labels": [...], "matrix": [[...]]}`.
 *
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum GhtStatus ght_space_from_json(const char *json, double eps, struct GhtSpace **out);

/**
 * # Safety
 * `space` must come from this library and not be used afterwards.
 */
void ght_space_free(struct GhtSpace *space);

/**
 * Number of points, 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t ght_space_len(const struct GhtSpace *space);

/**
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum GhtStatus ght_space_diameter(const struct GhtSpace *space, double *out);

/**
 * Exact Gromov-Hausdorff distance. The witness is written to `pairs` as
 * `(x_index, y_index)` couples, `2 * pairs_len` entries; `pairs_cap`
 * counts couples. With a short buffer the call fails with
 * `BufferTooSmall` having written the value and the required length.
 * `max_cells = 0` selects the default budget.
 *
 * # Safety
 * Handles must be live; `value` and `pairs_len` writable; `pairs` null or
 * room for `2 * pairs_cap` entries.
 */
enum GhtStatus ght_gh_exact(const struct GhtSpace *x,
                            const struct GhtSpace *y,
                            size_t max_cells,
                            double *value,
                            size_t *pairs,
                            size_t pairs_cap,
                            size_t *pairs_len);

/**
 * Writes the `n x n` minimax matrix row-major; `cap` counts doubles.
 *
 * # Safety
 * `space` must be live and `out` hold `cap` doubles.
 */
enum GhtStatus ght_minimax_matrix(const struct GhtSpace *space, double *out, size_t cap);

/**
 * `diam U(X) / 2`, zero exactly when `X` is dotted connected.
 *
 * # Safety
 * `space` must be live and `out` writable.
 */
enum GhtStatus ght_connectivity_defect(const struct GhtSpace *space, double *out);

/**
 * Builds a tree from `{"vertices": [...], "edges": [[u, v, len]]}`.
 *
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum GhtStatus ght_tree_from_json(const char *json, double eps, struct GhtTree **out);

/**
 * # Safety
 * `tree` must come from this library and not be used afterwards.
 */
void ght_tree_free(struct GhtTree *tree);

/**
 * Tree report for the subset `{"vertices": [...], "edge_points": [[e, s]]}`
 * as a JSON string, to be released with `ght_string_free`.
 *
 * # Safety
 * `tree` must be live, `subset_json` a valid C string, `out` writable.
 */
enum GhtStatus ght_tree_report_json(const struct GhtTree *tree,
                                    const char *subset_json,
                                    size_t max_cells,
                                    char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ght_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Owned by the
 * library and valid until the next call.
 */
const char *ght_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHTREE_H */
