#ifndef ANHARMONIC_H
#define ANHARMONIC_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  ANH_STATUS_OK = 0,
  ANH_STATUS_NULL_POINTER = 1,
  ANH_STATUS_INVALID_ARGUMENT = 2,
  ANH_STATUS_NUMERICAL = 3,
  ANH_STATUS_INVALID_TREE = 4,
  ANH_STATUS_VERIFICATION_FAILED = 5,
  ANH_STATUS_BUFFER_TOO_SMALL = 6,
  ANH_STATUS_PANIC = 7,
} AnhStatus;

/**
 * Parsed even potential.
 */
typedef struct AnhPotential AnhPotential;

/**
 * Closed-form eigenpairs of one QES sextic.
 */
typedef struct AnhQes AnhQes;

/**
 * Validated embedded tree.
 */
typedef struct AnhTree AnhTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Free with
 * [`anh_string_free`].
 */
char *anh_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library.
 */
void anh_string_free(char *s);

/**
 * Parse a potential such as `"z^4+z^2"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
AnhStatus anh_potential_parse(const char *text, AnhPotential **out);

/**
 * Build a potential from its even coefficients `c0, c2, c4, ...`.
 *
 * # Safety
 * `coeffs` must point to `len` doubles and `out` be a valid pointer.
 */
AnhStatus anh_potential_from_coeffs(const double *coeffs, size_t len, AnhPotential **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void anh_potential_free(AnhPotential *p);

/**
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
AnhStatus anh_potential_degree(const AnhPotential *p, size_t *out);

/**
 * Eigenvalues `λ_0..λ_{len−1}` into `lambdas`, and optionally their real
 * zero counts into `zero_counts` (may be null).
 *
 * # Safety
 * `p` must be a live handle; `lambdas` (and `zero_counts` if non-null) must
 * hold `len` elements.
 */
AnhStatus anh_eigenvalues(const AnhPotential *p,
                          double tol,
                          double *lambdas,
                          size_t *zero_counts,
                          size_t len);

/**
 * Zero census of the `k`-th eigenfunction in `[−x_max, x_max] × [−y_max,
 * y_max]`, as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out_json` a valid pointer.
 */
AnhStatus anh_census_json(const AnhPotential *p,
                          size_t k,
                          double x_max,
                          double y_max,
                          double tol,
                          char **out_json);

/**
 * Solve the QES sextic with parameters `(m, p, b)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
AnhStatus anh_qes_new(uint32_t m, uint32_t p, double b, AnhQes **out);

/**
 * # Safety
 * `q` must be null or a handle from this library, not yet freed.
 */
void anh_qes_free(AnhQes *q);

/**
 * Number of closed-form solutions (`m + 1`).
 *
 * # Safety
 * `q` must be a live handle and `out` a valid pointer.
 */
AnhStatus anh_qes_solution_count(const AnhQes *q, size_t *out);

/**
 * Eigenvalues of the solutions in increasing order.
 *
 * # Safety
 * `q` must be a live handle and `lambdas` hold `len` doubles.
 */
AnhStatus anh_qes_eigenvalues(const AnhQes *q, double *lambdas, size_t len);

/**
 * All solutions as JSON.
 *
 * # Safety
 * `q` must be a live handle and `out_json` a valid pointer.
 */
AnhStatus anh_qes_json(const AnhQes *q, char **out_json);

/**
 * Number of double-symmetric trees with `ends` ends.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
AnhStatus anh_trees_count(size_t ends, bool on_axes, size_t *out);

/**
 * Catalogue of double-symmetric trees as JSON.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
AnhStatus anh_trees_enumerate_json(size_t ends, bool on_axes, char **out_json);

/**
 * Parse and validate a tree from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
AnhStatus anh_tree_from_json(const char *json, AnhTree **out);

/**
 * # Safety
 * `t` must be null or a handle from this library, not yet freed.
 */
void anh_tree_free(AnhTree *t);

/**
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
AnhStatus anh_tree_canonical_form(const AnhTree *t, char **out);

/**
 * Structural checks for degree `d`; returns `VERIFICATION_FAILED` when a
 * clause fails. The report is written to `out_json` either way.
 *
 * # Safety
 * `t` must be a live handle and `out_json` a valid pointer.
 */
AnhStatus anh_tree_check(const AnhTree *t, size_t d, bool alternating, char **out_json);

/**
 * The exact tree-count suite as a JSON report.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
AnhStatus anh_verify_trees(char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANHARMONIC_H */
