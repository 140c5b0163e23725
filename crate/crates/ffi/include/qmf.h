#ifndef QMF_H
#define QMF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmfBackend {
  QMF_BACKEND_EXACT = 0,
  QMF_BACKEND_IDEAL = 1,
  QMF_BACKEND_STATEVECTOR = 2,
  QMF_BACKEND_NOISY = 3,
} QmfBackend;

typedef enum QmfStatus {
  QMF_STATUS_OK = 0,
  QMF_STATUS_NULL_POINTER = 1,
  QMF_STATUS_INVALID_ARGUMENT = 2,
  QMF_STATUS_DATA_ERROR = 3,
  QMF_STATUS_PLAN_ERROR = 4,
  QMF_STATUS_INTERNAL = 5,
  QMF_STATUS_PANIC = 6,
} QmfStatus;

/**
 * Opaque matched-filter output.
 */
typedef struct QmfSeries QmfSeries;

/**
 * Hybrid estimator settings. `k_d == 0` selects the segment length
 * automatically.
 */
typedef struct QmfHybridParams {
  enum QmfBackend backend;
  size_t k_d;
  size_t k_t;
  uint64_t shots_per_run;
  double margin;
  uint64_t seed;
  double p_two_qubit;
  double p_readout;
} QmfHybridParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *qmf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qmf_version(void);

struct QmfHybridParams qmf_hybrid_params_default(void);

/**
 * Classical matched filter `rho[j] = Σ data[j+i]·template[i]`.
 *
 * # Safety
 * `template` and `data` must point to `template_len` and `data_len`
 * doubles; `out` must be writable.
 */
enum QmfStatus qmf_oracle_snr(const double *template_,
                              size_t template_len,
                              const double *data,
                              size_t data_len,
                              double sample_rate,
                              struct QmfSeries **out);

/**
 * Hybrid estimate of the matched filter.
 *
 * # Safety
 * As [`qmf_oracle_snr`]; `params` must point to a valid struct.
 */
enum QmfStatus qmf_estimate_snr(const double *template_,
                                size_t template_len,
                                const double *data,
                                size_t data_len,
                                double sample_rate,
                                const struct QmfHybridParams *params,
                                struct QmfSeries **out);

/**
 * Number of lags; 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t qmf_series_len(const struct QmfSeries *series);

/**
 * Value and standard error at `lag`. `sigma` receives NaN when the
 * series carries none; either output may be null.
 *
 * # Safety
 * `series` must be a live handle; outputs must be null or writable.
 */
enum QmfStatus qmf_series_get(const struct QmfSeries *series,
                              size_t lag,
                              double *value,
                              double *sigma);

/**
 * Copies up to `capacity` values into `buffer`; returns how many were written.
 *
 * # Safety
 * `series` must be null or live; `buffer` must hold `capacity` doubles.
 */
size_t qmf_series_values(const struct QmfSeries *series, double *buffer, size_t capacity);

/**
 * Lag with the largest |value|, or -1 for an empty or null series.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
int64_t qmf_series_peak_lag(const struct QmfSeries *series);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `series` must be null or a handle not yet freed.
 */
void qmf_series_free(struct QmfSeries *series);

/**
 * Predicted standard error per lag for `shots_per_lag` shots.
 *
 * # Safety
 * `values`, `corrections` and `sigma_out` must each hold `len` doubles.
 */
enum QmfStatus qmf_predict_precision(const double *values,
                                     const double *corrections,
                                     size_t len,
                                     double shots_per_lag,
                                     double *sigma_out);

/**
 * Integer segment length minimizing the sampling cost for template chunks
 * of `n` points, and the real stationary point.
 *
 * # Safety
 * Outputs must be null or writable.
 */
enum QmfStatus qmf_optimal_segment_length(size_t n, size_t *k_out, double *root_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMF_H */
