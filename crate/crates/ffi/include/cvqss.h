#ifndef CVQSS_H
#define CVQSS_H

/* Generated by cbindgen from the cvqss-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of an FFI call. Zero is success; everything else names the
// first failure encountered.
typedef enum CvqssStatus {
  CVQSS_STATUS_OK = 0,
  CVQSS_STATUS_NULL_POINTER = 1,
  CVQSS_STATUS_INVALID_UTF8 = 2,
  CVQSS_STATUS_NON_FINITE = 3,
  CVQSS_STATUS_DIMENSION_MISMATCH = 4,
  CVQSS_STATUS_INVALID_PARAM = 5,
  CVQSS_STATUS_RANK_DEFICIENT = 6,
  CVQSS_STATUS_NOT_ORTHONORMAL = 7,
  CVQSS_STATUS_SINGULAR = 8,
  CVQSS_STATUS_NO_CLONING = 9,
  CVQSS_STATUS_BAD_INDEX = 10,
  CVQSS_STATUS_BAD_SUBSET = 11,
  CVQSS_STATUS_TOO_MANY_DROPPED = 12,
  CVQSS_STATUS_GENERATION_FAILED = 13,
  CVQSS_STATUS_INCONSISTENT_EXPANSION = 14,
  CVQSS_STATUS_KAPPA_UNDEFINED = 15,
  CVQSS_STATUS_SERIALIZATION = 16,
  CVQSS_STATUS_INTERNAL_PANIC = 17,
} CvqssStatus;

// Factored disentangling plan handle. Opaque to C.
typedef struct CvqssPlan CvqssPlan;

// Generated scheme handle. Opaque to C.
typedef struct CvqssScheme CvqssScheme;

// Cost-minimization result as a plain C struct. `case_tag` is 1 when
// both eigenvalues sit on one side of 1 at the optimum and 2 when they
// straddle it.
typedef struct CvqssCostMin {
  double gamma0;
  double r_min;
  double lambda1;
  double lambda2;
  int case_tag;
} CvqssCostMin;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Generates a random (k, n) scheme.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that
// must be released with `cvqss_scheme_free`.
enum CvqssStatus cvqss_scheme_generate(size_t k, size_t n, uint64_t seed, struct CvqssScheme **out);

// Parses a scheme document produced by `cvqss_scheme_to_json` or the
// CLI scheme command.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; on
// success `out` receives a handle to free with `cvqss_scheme_free`.
enum CvqssStatus cvqss_scheme_from_json(const char *json, struct CvqssScheme **out);

// Serializes a scheme to its JSON document form.
//
// # Safety
// `scheme` must come from this library and `out` must be valid; the
// returned string must be released with `cvqss_string_free`.
enum CvqssStatus cvqss_scheme_to_json(const struct CvqssScheme *scheme, char **out);

// Threshold k of the scheme, or 0 when `scheme` is NULL.
//
// # Safety
// `scheme` must be NULL or a live handle from this library.
size_t cvqss_scheme_k(const struct CvqssScheme *scheme);

// Number of available shares, or 0 when `scheme` is NULL.
//
// # Safety
// `scheme` must be NULL or a live handle from this library.
size_t cvqss_scheme_n(const struct CvqssScheme *scheme);

// Releases a scheme handle. NULL is a no-op.
//
// # Safety
// `scheme` must be NULL or an unreleased handle from this library.
void cvqss_scheme_free(struct CvqssScheme *scheme);

// Builds the two-squeezer disentangling plan for a collaborating
// subset. `subset` lists 0-based share indices, `subset_len` of them.
// `gamma` may be NULL to use the squeezing-optimal free parameter.
//
// # Safety
// `scheme` must be a live handle, `subset` must point to `subset_len`
// indices, `gamma` must be NULL or valid, and `out` must be valid; on
// success `out` receives a handle to free with `cvqss_plan_free`.
enum CvqssStatus cvqss_plan_build(const struct CvqssScheme *scheme,
                                  const size_t *subset,
                                  size_t subset_len,
                                  const double *gamma,
                                  struct CvqssPlan **out);

// First squeezing exponent, or NaN when `plan` is NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_r1(const struct CvqssPlan *plan);

// Second squeezing exponent, or NaN when `plan` is NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_r2(const struct CvqssPlan *plan);

// Secret coefficient of the expanded transform, or NaN when NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_alpha(const struct CvqssPlan *plan);

// First-row noise coefficient, or NaN when NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_beta(const struct CvqssPlan *plan);

// Free parameter the plan was built with, or NaN when NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_gamma(const struct CvqssPlan *plan);

// Total squeezing |r1| + |r2| in nats, or NaN when NULL.
//
// # Safety
// `plan` must be NULL or a live handle from this library.
double cvqss_plan_total_squeezing(const struct CvqssPlan *plan);

// Serializes a plan to its JSON document form.
//
// # Safety
// `plan` must be a live handle and `out` valid; the returned string
// must be released with `cvqss_string_free`.
enum CvqssStatus cvqss_plan_to_json(const struct CvqssPlan *plan, char **out);

// Releases a plan handle. NULL is a no-op.
//
// # Safety
// `plan` must be NULL or an unreleased handle from this library.
void cvqss_plan_free(struct CvqssPlan *plan);

// Minimizes total squeezing over the free parameter. `use_oracle`
// false takes the closed-form route, true the grid-plus-golden-section
// numerical route.
//
// # Safety
// `out` must be a valid pointer.
enum CvqssStatus cvqss_cost_minimize(double alpha,
                                     double beta,
                                     bool use_oracle,
                                     struct CvqssCostMin *out);

// Total squeezing |ln lambda1| + |ln lambda2| at a given free
// parameter.
//
// # Safety
// `out` must be a valid pointer.
enum CvqssStatus cvqss_total_squeezing(double alpha, double beta, double gamma, double *out);

// Replica fidelity from noise weights (u, v) at ancilla width a.
//
// # Safety
// `out` must be a valid pointer.
enum CvqssStatus cvqss_analytic_fidelity(double u, double v, double a, double *out);

// Runs the full pipeline for a collaborating subset at ancilla width a
// and secret mean (mean_x, mean_p), writing the simulated and the
// closed-form fidelity. `gamma` may be NULL for the optimal choice.
//
// # Safety
// `scheme` must be a live handle, `subset` must point to `subset_len`
// indices, `gamma` must be NULL or valid, and both out pointers must
// be valid.
enum CvqssStatus cvqss_end_to_end_fidelity(const struct CvqssScheme *scheme,
                                           const size_t *subset,
                                           size_t subset_len,
                                           double a,
                                           const double *gamma,
                                           double mean_x,
                                           double mean_p,
                                           double *out_simulated,
                                           double *out_analytic);

// Distinguishability of two secrets from a (k-1)-member coalition's
// marginal, in [0, 1].
//
// # Safety
// `scheme` must be a live handle, `coalition` must point to
// `coalition_len` indices, and `out` must be valid.
enum CvqssStatus cvqss_adversary_leakage(const struct CvqssScheme *scheme,
                                         const size_t *coalition,
                                         size_t coalition_len,
                                         double a,
                                         double first_x,
                                         double first_p,
                                         double second_x,
                                         double second_p,
                                         double *out);

// Releases a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string obtained from this library that has not
// already been freed.
void cvqss_string_free(char *s);

// Static name for a status code; never NULL.
const char *cvqss_status_name(enum CvqssStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CVQSS_H */
