#ifndef DEPINFER_H
#define DEPINFER_H

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes. Zero is success.
 */
typedef enum DiStatus {
  DI_STATUS_OK = 0,
  DI_STATUS_NULL_POINTER = 1,
  DI_STATUS_INVALID_PARAMETER = 2,
  DI_STATUS_DATA_ERROR = 3,
  DI_STATUS_NUMERICAL_ERROR = 4,
  DI_STATUS_PANIC = 5,
} DiStatus;

/**
 * Dependence measure selector.
 */
typedef enum DiMeasure {
  DI_MEASURE_ABS_POWER_AUTOCOV = 0,
  DI_MEASURE_ABS_POWER_AUTOCORR = 1,
  DI_MEASURE_SIGNED_POWER_CROSSCOV = 2,
  DI_MEASURE_SIGNED_POWER_CROSSCORR = 3,
} DiMeasure;

/**
 * Opaque handle to an immutable return series.
 */
typedef struct DiSeries DiSeries;

/**
 * Common summary of a HAC or group t-test.
 */
typedef struct DiTestResult {
  double estimate;
  double t_stat;
  double p_value;
  double ci_lower;
  double ci_upper;
  double critical_value;
  /**
   * 1 when the null is rejected at level `1 − confidence`.
   */
  int32_t reject;
} DiTestResult;

typedef struct DiTailResult {
  double zeta_hat;
  double std_err;
  double ci_lower;
  double ci_upper;
  uintptr_t k_used;
} DiTailResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *di_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *di_version(void);

/**
 * Copies `len` values into a new series handle.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum DiStatus di_series_new(const double *values, uintptr_t len, struct DiSeries **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void di_series_free(struct DiSeries *s);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
uintptr_t di_series_len(const struct DiSeries *s);

/**
 * Copies up to `cap` values into `buf` and returns the series length.
 *
 * # Safety
 * `s` must be a live handle; `buf` must hold `cap` doubles.
 */
uintptr_t di_series_copy(const struct DiSeries *s, double *buf, uintptr_t cap);

/**
 * Simulates an AR(1)-GARCH(1,1) series. `eta = 0` selects standard normal
 * innovations, otherwise a skewed t with `eta` degrees of freedom and
 * skewness `lambda`. A negative `burn_in` selects the default.
 *
 * # Safety
 * `out` must be writable.
 */
enum DiStatus di_simulate(double phi,
                          double omega,
                          double alpha,
                          double beta,
                          double eta,
                          double lambda,
                          uintptr_t len,
                          int64_t burn_in,
                          uint64_t seed,
                          struct DiSeries **out);

/**
 * Point estimate of a dependence measure at `lag`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DiStatus di_estimate(const struct DiSeries *s,
                          enum DiMeasure measure,
                          double exponent,
                          uintptr_t lag,
                          double *out);

/**
 * Group t-test with `q` blocks of `H₀: β = beta0`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DiStatus di_group_test(const struct DiSeries *s,
                            enum DiMeasure measure,
                            double exponent,
                            uintptr_t lag,
                            uintptr_t q,
                            double beta0,
                            double confidence,
                            struct DiTestResult *out);

/**
 * HAC t-test of `H₀: β = beta0` with the quadratic-spectral kernel and
 * automatic bandwidth.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DiStatus di_hac_test(const struct DiSeries *s,
                          enum DiMeasure measure,
                          double exponent,
                          uintptr_t lag,
                          double beta0,
                          double confidence,
                          struct DiTestResult *out);

/**
 * Tail index `ζ` solving `E[(αZ² + β)^{ζ/2}] = 1`; `eta = 0` selects normal
 * innovations.
 *
 * # Safety
 * `out` must be writable.
 */
enum DiStatus di_kesten_zeta(double alpha, double beta, double eta, double lambda, double *out);

/**
 * Rank-size tail-index estimate from the largest `fraction` of `|R_t|`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum DiStatus di_tail_index(const struct DiSeries *s, double fraction, struct DiTailResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEPINFER_H */
