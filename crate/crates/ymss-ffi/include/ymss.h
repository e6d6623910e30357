#ifndef YMSS_H
#define YMSS_H

/* Generated by cbindgen from the ymss-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum YmssStatus {
  YMSS_STATUS_OK = 0,
  YMSS_STATUS_NULL_POINTER = 1,
  YMSS_STATUS_INVALID_ARGUMENT = 2,
  YMSS_STATUS_DERIVATION_FAILED = 3,
  YMSS_STATUS_SHOOTING_FAILED = 4,
  YMSS_STATUS_NOT_AVAILABLE = 5,
} YmssStatus;

/**
 * Opaque analysis record for one dimension.
 */
typedef struct YmssCase YmssCase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the most recent error message on this thread, or null.
 * The caller owns the string and must release it with `ymss_string_free`.
 */
char *ymss_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library, or null.
 */
void ymss_string_free(char *s);

/**
 * Run the exact pipeline for odd dimension d and return an opaque handle.
 */
enum YmssStatus ymss_analyze(int d, struct YmssCase **out);

/**
 * Run the exact pipeline and additionally construct the third solution
 * numerically (double-double working precision). Pass 0 for any tolerance
 * to keep its default (tol 1e-12, delta 1e-6, tol_c 1e-8).
 */
enum YmssStatus ymss_analyze_with_shooting(int d,
                                           double tol,
                                           double delta,
                                           double tol_c,
                                           struct YmssCase **out);

/**
 * Release a case handle.
 *
 * # Safety
 * `case` must be a handle returned by an analyze call, or null.
 */
void ymss_case_free(struct YmssCase *case_);

/**
 * Dimension d of the case, or -1 for a null handle.
 */
int ymss_case_dimension(const struct YmssCase *case_);

/**
 * Number of roots of P_m in (0,1), or -1 for a null handle.
 */
int ymss_case_root_count(const struct YmssCase *case_);

/**
 * 1 when the quadratic factor of the explicit roots divides P_m exactly.
 */
int ymss_case_division_exact(const struct YmssCase *case_);

/**
 * 1 when the coefficient sign pattern of S_m holds (positive leading,
 * all lower coefficients negative).
 */
int ymss_case_sign_pattern_ok(const struct YmssCase *case_);

/**
 * 1 when S_m has exactly one root in (0,1).
 */
int ymss_case_unique_zero(const struct YmssCase *case_);

/**
 * 1 when every hard internal-consistency check of the case passed.
 */
int ymss_case_pass(const struct YmssCase *case_);

/**
 * Ordering of z* against the explicit pair z-: 1 for z- < z* < z+,
 * 2 for z* < z- < z+, 3 otherwise; 0 when no ordering was computed.
 */
int ymss_case_ordering(const struct YmssCase *case_);

/**
 * Rounded endpoints of the exact bracket around z*.
 */
enum YmssStatus ymss_case_zstar(const struct YmssCase *case_, double *lo, double *hi);

/**
 * Converged shooting parameter of the third solution, when attached.
 */
enum YmssStatus ymss_case_astar(const struct YmssCase *case_, double *out);

/**
 * Full case record as a JSON document. The caller owns the string.
 */
char *ymss_case_json(const struct YmssCase *case_);

/**
 * One-shot root count for odd dimension d.
 */
enum YmssStatus ymss_count_roots(int d, int *out);

/**
 * Shooting parameter with c(a) = c_target, double-double working precision.
 * Pass 0 for tol_c to keep the default 1e-8.
 */
enum YmssStatus ymss_find_astar(int d, double c_target, double tol_c, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YMSS_H */
