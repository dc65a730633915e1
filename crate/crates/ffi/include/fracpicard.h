#ifndef FRACPICARD_H
#define FRACPICARD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_INVALID_ARGUMENT = 2,
  FP_STATUS_PARSE_ERROR = 3,
  FP_STATUS_EVAL_ERROR = 4,
  FP_STATUS_HYPOTHESIS_FAILED = 5,
  FP_STATUS_NOT_CONVERGED = 6,
  FP_STATUS_PANIC = 7,
} FpStatus;

/**
 * Parsed expression in `x`.
 */
typedef struct FpExpr FpExpr;

/**
 * Problem data: order, initial value, coefficients, maps and constants.
 */
typedef struct FpProblem FpProblem;

/**
 * Solved problem with its certificate.
 */
typedef struct FpSolution FpSolution;

/**
 * Solver controls; obtain defaults from [`fp_solver_options_default`].
 */
typedef struct FpSolverOptions {
  double tol;
  size_t max_iter;
  size_t quad_order;
  size_t grid_size;
  uint64_t seed;
} FpSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fp_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fp_string_free(char *s);

/**
 * `Γ(x)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FpStatus fp_gamma(double x, double *out);

/**
 * Parses an expression in `x`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum FpStatus fp_expr_parse(const char *text, struct FpExpr **out);

/**
 * Evaluates at `x = re + i·im`.
 *
 * # Safety
 * `e` must be a live handle; `out_re` and `out_im` valid for writes.
 */
enum FpStatus fp_expr_eval(const struct FpExpr *e,
                           double re,
                           double im,
                           double *out_re,
                           double *out_im);

/**
 * Canonical text of the expression; free with [`fp_string_free`].
 *
 * # Safety
 * `e` must be a live handle and `out` valid for writes.
 */
enum FpStatus fp_expr_to_string(const struct FpExpr *e, char **out);

/**
 * # Safety
 * `e` must come from [`fp_expr_parse`] and not be freed twice. NULL is ignored.
 */
void fp_expr_free(struct FpExpr *e);

/**
 * Builds a problem from expression strings.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` valid for writes.
 */
enum FpStatus fp_problem_new(double alpha,
                             double lambda_re,
                             double lambda_im,
                             const char *a,
                             const char *b,
                             const char *psi,
                             const char *phi,
                             double alpha0,
                             double beta0,
                             double k,
                             double sigma,
                             struct FpProblem **out);

/**
 * `C(x+1)·sin(u(L(x))) + γ·sin(x+1)` with `u(−1) = λ`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FpStatus fp_problem_example1(double alpha,
                                  double c,
                                  double gamma_coef,
                                  double lambda,
                                  struct FpProblem **out);

/**
 * `η·sin(x+1)·cos(u(L(x)))` with `u(−1) = λ`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FpStatus fp_problem_example2(double alpha, double eta, double lambda, struct FpProblem **out);

/**
 * # Safety
 * `p` must come from a `fp_problem_*` constructor and not be freed twice.
 */
void fp_problem_free(struct FpProblem *p);

/**
 * Checks the hypotheses. Writes 1 or 0 to `all_passed` and, if `json_out`
 * is not NULL, the report as JSON (free with [`fp_string_free`]).
 *
 * # Safety
 * `p` must be a live handle and `all_passed` valid for writes.
 */
enum FpStatus fp_check(const struct FpProblem *p,
                       uint64_t seed,
                       int32_t *all_passed,
                       char **json_out);

struct FpSolverOptions fp_solver_options_default(void);

/**
 * Certifies and solves. `opts` may be NULL for defaults.
 *
 * # Safety
 * `p` must be a live handle, `opts` NULL or valid, `out` valid for writes.
 */
enum FpStatus fp_solve(const struct FpProblem *p,
                       const struct FpSolverOptions *opts,
                       struct FpSolution **out);

/**
 * `u(t)` for `t ∈ [−1, 1]`.
 *
 * # Safety
 * `s` must be a live handle; `out_re` and `out_im` valid for writes.
 */
enum FpStatus fp_solution_eval(const struct FpSolution *s,
                               double t,
                               double *out_re,
                               double *out_im);

/**
 * Number of Picard iterations performed, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t fp_solution_iterations(const struct FpSolution *s);

/**
 * Certificate as JSON; free with [`fp_string_free`].
 *
 * # Safety
 * `s` must be a live handle and `out` valid for writes.
 */
enum FpStatus fp_solution_certificate_json(const struct FpSolution *s, char **out);

/**
 * # Safety
 * `s` must come from [`fp_solve`] and not be freed twice. NULL is ignored.
 */
void fp_solution_free(struct FpSolution *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACPICARD_H */
