/* C interface to the wcc consensus clustering library. Generated by cbindgen; do not edit. */

#ifndef WCC_H
#define WCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WccStatus {
  WCC_STATUS_OK = 0,
  WCC_STATUS_NULL_POINTER = 1,
  WCC_STATUS_INVALID_INPUT = 2,
  WCC_STATUS_NUMERICAL = 3,
  /**
   * No calibrated cell (every score undefined).
   */
  WCC_STATUS_NO_STABLE_STRUCTURE = 4,
  WCC_STATUS_BUFFER_TOO_SMALL = 5,
  WCC_STATUS_PANIC = 6,
} WccStatus;

typedef enum WccMethod {
  WCC_METHOD_UNWEIGHTED = 0,
  WCC_METHOD_SPARCL = 1,
  WCC_METHOD_COSA = 2,
} WccMethod;

typedef enum WccAlgorithm {
  WCC_ALGORITHM_HIERARCHICAL = 0,
  WCC_ALGORITHM_PAM = 1,
} WccAlgorithm;

typedef enum WccLinkage {
  WCC_LINKAGE_COMPLETE = 0,
  WCC_LINKAGE_AVERAGE = 1,
  WCC_LINKAGE_SINGLE = 2,
} WccLinkage;

typedef enum WccScore {
  WCC_SCORE_CONSENSUS = 0,
  WCC_SCORE_DELTA = 1,
  WCC_SCORE_PAC = 2,
  WCC_SCORE_SILHOUETTE = 3,
} WccScore;

/**
 * Opaque data matrix.
 */
typedef struct WccData WccData;

/**
 * Opaque result of [`wcc_cluster`].
 */
typedef struct WccResult WccResult;

/**
 * Run settings. Start from [`wcc_config_default`].
 */
typedef struct WccConfig {
  enum WccMethod method;
  enum WccAlgorithm algorithm;
  enum WccLinkage linkage;
  enum WccScore score;
  /**
   * Number of subsamples.
   */
  size_t k;
  /**
   * Subsampling proportion in (0, 1].
   */
  double tau;
  uint64_t seed;
  /**
   * Inclusive range of the number of clusters.
   */
  size_t g_min;
  size_t g_max;
  /**
   * Optional lambda grid; null selects the method default.
   */
  const double *lambdas;
  size_t n_lambdas;
  bool standardize;
  /**
   * 0 uses all cores.
   */
  size_t threads;
} WccConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error on this thread, empty after a successful call.
 * The pointer stays valid until the next call on the same thread.
 */
const char *wcc_last_error_message(void);

/**
 * Copies an `n x p` row-major matrix into a new data handle.
 *
 * # Safety
 * `values` must point to `n * p` readable doubles and `out` to writable
 * storage for one pointer.
 */
enum WccStatus wcc_data_new(const double *values, size_t n, size_t p, struct WccData **out);

/**
 * # Safety
 * `data` must come from [`wcc_data_new`] and not be freed twice. Null is
 * ignored.
 */
void wcc_data_free(struct WccData *data);

struct WccConfig wcc_config_default(void);

/**
 * Runs consensus clustering and calibration.
 *
 * # Safety
 * `data` must be a live handle, `config` readable (its `lambdas` pointing
 * to `n_lambdas` doubles when non-null) and `out` writable.
 */
enum WccStatus wcc_cluster(const struct WccData *data,
                           const struct WccConfig *config,
                           struct WccResult **out);

/**
 * # Safety
 * `result` must come from [`wcc_cluster`] and not be freed twice. Null is
 * ignored.
 */
void wcc_result_free(struct WccResult *result);

/**
 * Number of items, or 0 for a null handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t wcc_result_n(const struct WccResult *result);

/**
 * Calibrated number of clusters, penalty and score.
 *
 * # Safety
 * `result` must be a live handle; each output pointer may be null.
 */
enum WccStatus wcc_result_calibration(const struct WccResult *result,
                                      size_t *g,
                                      double *lambda,
                                      double *score);

/**
 * Copies the stable cluster labels (1-based) into `labels[0..len]`;
 * `len` must be at least [`wcc_result_n`].
 *
 * # Safety
 * `result` must be a live handle and `labels` writable for `len` values.
 */
enum WccStatus wcc_result_labels(const struct WccResult *result, uint32_t *labels, size_t len);

/**
 * Consensus score from within/between tallies; `-INFINITY` when undefined.
 */
double wcc_consensus_score(uint64_t x_within,
                           uint64_t x_between,
                           uint64_t n_within,
                           uint64_t n_between);

/**
 * Adjusted Rand index between two labelings of `n` items. Labels are
 * arbitrary integers.
 *
 * # Safety
 * `a` and `b` must point to `n` readable values and `out` be writable.
 */
enum WccStatus wcc_adjusted_rand_index(const uint32_t *a, const uint32_t *b, size_t n, double *out);

/**
 * Simulates `sum(sizes)` items over `p` attributes, the first `q` with
 * explained variance `e`. Writes row-major values (`n * p`) and 1-based
 * true labels (`n`) into caller buffers.
 *
 * # Safety
 * `sizes` must hold `n_clusters` values; `values` and `labels` must be
 * writable for `n * p` and `n` entries.
 */
enum WccStatus wcc_simulate(const size_t *sizes,
                            size_t n_clusters,
                            size_t p,
                            size_t q,
                            double e,
                            uint64_t seed,
                            double *values,
                            uint32_t *labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WCC_H */
