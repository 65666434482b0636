#ifndef CONEBESSEL_H
#define CONEBESSEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ConebesselStatus {
  CONEBESSEL_STATUS_OK = 0,
  CONEBESSEL_STATUS_USAGE = 1,
  CONEBESSEL_STATUS_UNSUPPORTED_ALGEBRA = 2,
  CONEBESSEL_STATUS_SINGULAR = 3,
  CONEBESSEL_STATUS_DOMAIN = 4,
  CONEBESSEL_STATUS_NOT_IN_CONE = 5,
  CONEBESSEL_STATUS_NON_GENERIC = 6,
  CONEBESSEL_STATUS_NO_CONVERGENCE = 7,
  CONEBESSEL_STATUS_ILL_CONDITIONED = 8,
  CONEBESSEL_STATUS_DIVERGENT = 9,
  CONEBESSEL_STATUS_NON_FINITE_WEIGHT = 10,
  CONEBESSEL_STATUS_UNKNOWN_CHECK = 11,
  CONEBESSEL_STATUS_NULL_POINTER = 12,
  CONEBESSEL_STATUS_INVALID_STRING = 13,
  CONEBESSEL_STATUS_PANIC = 14,
} ConebesselStatus;

/**
 * Zero-order sign of the system a J-solution is evaluated for.
 */
typedef enum ConebesselFlavor {
  CONEBESSEL_FLAVOR_OSCILLATORY = 0,
  CONEBESSEL_FLAVOR_MODIFIED = 1,
} ConebesselFlavor;

/**
 * Order, Peirce constant, truncation tolerance and flavor.
 */
typedef struct ConebesselParams ConebesselParams;

/**
 * A finished verification run.
 */
typedef struct ConebesselReport ConebesselReport;

/**
 * A series value with its error estimate and the number of terms summed.
 */
typedef struct ConebesselEval {
  double value;
  double err;
  uint64_t work;
} ConebesselEval;

/**
 * A Monte Carlo estimate.
 */
typedef struct ConebesselMc {
  double value;
  double std_error;
  uint64_t n_samples;
  uint64_t seed;
} ConebesselMc;

/**
 * Numeric part of one verification result.
 */
typedef struct ConebesselCheck {
  bool passed;
  double observed;
  double bound;
  uint64_t work;
} ConebesselCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *conebessel_version(void);

/**
 * Message of the most recent failure on this thread, or NULL if none.
 * The pointer is owned by the library.
 */
const char *conebessel_last_error(void);

/**
 * Creates a parameter handle with the default tolerance and the oscillatory
 * flavor.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum ConebesselStatus conebessel_params_new(double nu, double d, struct ConebesselParams **out);

/**
 * Sets the series truncation tolerance.
 *
 * # Safety
 * `params` must come from `conebessel_params_new` and not be freed.
 */
enum ConebesselStatus conebessel_params_set_tol(struct ConebesselParams *params, double tol);

/**
 * Selects the flavor used by `conebessel_eval_j`.
 *
 * # Safety
 * `params` must come from `conebessel_params_new` and not be freed.
 */
enum ConebesselStatus conebessel_params_set_flavor(struct ConebesselParams *params,
                                                   enum ConebesselFlavor flavor);

/**
 * Releases a parameter handle. NULL is ignored.
 *
 * # Safety
 * `params` must be NULL or come from `conebessel_params_new`, and must not
 * be used afterwards.
 */
void conebessel_params_free(struct ConebesselParams *params);

/**
 * Evaluates J^{[rank,j]} (or its partner t_r^{-nu} J_{-nu}) at the
 * elementary symmetric coordinates `t[0..len]`.
 *
 * # Safety
 * `params` must be a live handle, `t` must point to `len` doubles and `out`
 * to writable storage.
 */
enum ConebesselStatus conebessel_eval_j(const struct ConebesselParams *params,
                                        size_t rank,
                                        uint8_t j,
                                        bool partner,
                                        const double *t,
                                        size_t len,
                                        struct ConebesselEval *out);

/**
 * K-function from the series combination at the elementary symmetric
 * coordinates `t[0..len]`.
 *
 * # Safety
 * As for `conebessel_eval_j`.
 */
enum ConebesselStatus conebessel_eval_k_series(const struct ConebesselParams *params,
                                               size_t rank,
                                               const double *t,
                                               size_t len,
                                               struct ConebesselEval *out);

/**
 * K-function from the series combination at the eigenvalues `x[0..len]`.
 *
 * # Safety
 * As for `conebessel_eval_j`.
 */
enum ConebesselStatus conebessel_eval_k_series_x(const struct ConebesselParams *params,
                                                 size_t rank,
                                                 const double *x,
                                                 size_t len,
                                                 struct ConebesselEval *out);

/**
 * Monte Carlo estimate of the K integral at the diagonal element with
 * eigenvalues `x[0..len]`, using `n` samples. The estimate depends only on
 * the inputs and `seed`.
 *
 * # Safety
 * As for `conebessel_eval_j`.
 */
enum ConebesselStatus conebessel_eval_k_mc(const struct ConebesselParams *params,
                                           size_t rank,
                                           const double *x,
                                           size_t len,
                                           uint64_t n,
                                           uint64_t seed,
                                           struct ConebesselMc *out);

/**
 * Coefficients of the K-function in the J-basis. For rank 3, `a[0..4]` and
 * `b[0..4]` receive the plain and partner coefficients; for rank 2 only
 * `a[0..2]` and `b[0..2]` are written.
 *
 * # Safety
 * `a` and `b` must each point to at least four writable doubles.
 */
enum ConebesselStatus conebessel_coeffs(size_t rank, double nu, double d, double *a, double *b);

/**
 * Runs the checks named in `suite` ("all" or a comma-separated list).
 *
 * # Safety
 * `suite` must be a nul-terminated string and `out` valid for one write.
 */
enum ConebesselStatus conebessel_verify_run(const char *suite,
                                            uint64_t seed,
                                            struct ConebesselReport **out);

/**
 * Number of results in a report; 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
size_t conebessel_report_len(const struct ConebesselReport *report);

/**
 * Number of failed checks in a report; 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
size_t conebessel_report_failed(const struct ConebesselReport *report);

/**
 * Name of result `i`, owned by the report; NULL when out of range.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
const char *conebessel_report_name(const struct ConebesselReport *report, size_t i);

/**
 * Numeric fields of result `i`.
 *
 * # Safety
 * `report` must be a live report handle and `out` valid for one write.
 */
enum ConebesselStatus conebessel_report_check(const struct ConebesselReport *report,
                                              size_t i,
                                              struct ConebesselCheck *out);

/**
 * The report as JSON. The string must be released with
 * `conebessel_string_free`; NULL for a NULL report.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
char *conebessel_report_json(const struct ConebesselReport *report);

/**
 * Releases a report. NULL is ignored.
 *
 * # Safety
 * `report` must be NULL or come from `conebessel_verify_run`, and must not
 * be used afterwards.
 */
void conebessel_report_free(struct ConebesselReport *report);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string returned by `conebessel_report_json`.
 */
void conebessel_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONEBESSEL_H */
