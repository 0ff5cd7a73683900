#ifndef EFFIDX_H
#define EFFIDX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EffidxFractalMethod {
  EFFIDX_FRACTAL_METHOD_PERIODOGRAM = 0,
  EFFIDX_FRACTAL_METHOD_WAVELET = 1,
  EFFIDX_FRACTAL_METHOD_GENTON = 2,
  EFFIDX_FRACTAL_METHOD_HALL_WOOD = 3,
} EffidxFractalMethod;

typedef enum EffidxHurstMethod {
  // Mean of linear and quadratic DFA.
  EFFIDX_HURST_METHOD_DFA = 0,
  EFFIDX_HURST_METHOD_DMA = 1,
  EFFIDX_HURST_METHOD_HHCA = 2,
} EffidxHurstMethod;

typedef enum EffidxKpssVerdict {
  // p > 0.05
  EFFIDX_KPSS_VERDICT_STATIONARY = 0,
  // 0.01 < p < 0.05
  EFFIDX_KPSS_VERDICT_REJECT5 = 1,
  // p < 0.01
  EFFIDX_KPSS_VERDICT_REJECT1 = 2,
} EffidxKpssVerdict;

// The eight measures in index order.
typedef enum EffidxMeasure {
  EFFIDX_MEASURE_H_DFA = 0,
  EFFIDX_MEASURE_H_DMA = 1,
  EFFIDX_MEASURE_H_HHCA = 2,
  EFFIDX_MEASURE_D_PERIODOGRAM = 3,
  EFFIDX_MEASURE_D_WAVELET = 4,
  EFFIDX_MEASURE_D_GENTON = 5,
  EFFIDX_MEASURE_D_HALL_WOOD = 6,
  EFFIDX_MEASURE_RHO1 = 7,
} EffidxMeasure;

// Result code of every fallible call.
typedef enum EffidxStatus {
  EFFIDX_STATUS_OK = 0,
  EFFIDX_STATUS_NULL_POINTER = 1,
  EFFIDX_STATUS_INVALID_INPUT = 2,
  EFFIDX_STATUS_INSUFFICIENT_DATA = 3,
  EFFIDX_STATUS_DEGENERATE_INPUT = 4,
  EFFIDX_STATUS_DEGENERATE_FIT = 5,
  EFFIDX_STATUS_PARAMETER = 6,
  EFFIDX_STATUS_GENERATION = 7,
  EFFIDX_STATUS_IO = 8,
  EFFIDX_STATUS_PANIC = 99,
} EffidxStatus;

// Opaque efficiency report.
typedef struct EffidxReport EffidxReport;

// Opaque return series.
typedef struct EffidxReturns EffidxReturns;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *effidx_last_error_message(void);

// Builds a return series from `len` raw values (all finite).
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum EffidxStatus effidx_returns_from_values(const double *values,
                                             size_t len,
                                             struct EffidxReturns **out);

// Builds the log-return series of `len` positive closes in time order.
//
// # Safety
// `closes` must point to `len` readable doubles; `out` must be writable.
enum EffidxStatus effidx_returns_from_prices(const double *closes,
                                             size_t len,
                                             struct EffidxReturns **out);

// Exact fractional Gaussian noise; `t` must be a power of two of at least 256.
//
// # Safety
// `out` must be writable.
enum EffidxStatus effidx_synth_fgn(double h, size_t t, uint64_t seed, struct EffidxReturns **out);

// Number of returns, or 0 for a null handle.
//
// # Safety
// `r` must be null or a live handle.
size_t effidx_returns_len(const struct EffidxReturns *r);

// Releases a return series; null is ignored.
//
// # Safety
// `r` must be null or a handle not yet freed.
void effidx_returns_free(struct EffidxReturns *r);

// Hurst exponent with default parameters. Either out-pointer may be null.
//
// # Safety
// `r` must be a live handle; non-null out-pointers must be writable.
enum EffidxStatus effidx_hurst(const struct EffidxReturns *r,
                               enum EffidxHurstMethod method,
                               double *h_raw,
                               double *h_clamped);

// Fractal dimension of the integrated path with default parameters.
// Either out-pointer may be null.
//
// # Safety
// `r` must be a live handle; non-null out-pointers must be writable.
enum EffidxStatus effidx_fractal(const struct EffidxReturns *r,
                                 enum EffidxFractalMethod method,
                                 double *d_raw,
                                 double *d_clamped);

// Lag-one sample autocorrelation.
//
// # Safety
// `r` must be a live handle; `rho1` must be writable.
enum EffidxStatus effidx_acf1(const struct EffidxReturns *r, double *rho1);

// KPSS level-stationarity test; `bandwidth` 0 selects the default rule.
// Any out-pointer may be null.
//
// # Safety
// `r` must be a live handle; non-null out-pointers must be writable.
enum EffidxStatus effidx_kpss(const struct EffidxReturns *r,
                              size_t bandwidth,
                              double *statistic,
                              size_t *used_bandwidth,
                              enum EffidxKpssVerdict *verdict);

// Efficiency index of eight raw measures in `EffidxMeasure` order; values
// are clamped to their legal ranges first.
//
// # Safety
// `measures` must point to 8 readable doubles; `ei` must be writable.
enum EffidxStatus effidx_efficiency_index(const double *measures, double *ei);

// Full analysis with default parameters.
//
// # Safety
// `r` must be a live handle; `out` must be writable.
enum EffidxStatus effidx_analyze(const struct EffidxReturns *r, struct EffidxReport **out);

// Efficiency index of a report, or NaN for a null handle.
//
// # Safety
// `rep` must be null or a live handle.
double effidx_report_ei(const struct EffidxReport *rep);

// Local and global shares of EI². For a fully efficient report (EI = 0)
// `*defined` is set to false and the shares are left untouched.
//
// # Safety
// `rep` must be a live handle; all out-pointers must be writable.
enum EffidxStatus effidx_report_shares(const struct EffidxReport *rep,
                                       bool *defined,
                                       double *local_share,
                                       double *global_share);

// Raw and clamped value of one measure. Either out-pointer may be null.
//
// # Safety
// `rep` must be a live handle; non-null out-pointers must be writable.
enum EffidxStatus effidx_report_estimate(const struct EffidxReport *rep,
                                         enum EffidxMeasure measure,
                                         double *raw,
                                         double *clamped);

// The report as pretty JSON (same schema as the CLI). Free the string
// with `effidx_string_free`. Returns null on a null handle.
//
// # Safety
// `rep` must be null or a live handle.
char *effidx_report_to_json(const struct EffidxReport *rep);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void effidx_string_free(char *s);

// Releases a report; null is ignored.
//
// # Safety
// `rep` must be null or a handle not yet freed.
void effidx_report_free(struct EffidxReport *rep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFFIDX_H */
