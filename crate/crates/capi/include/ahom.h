/* C interface to the adaptive high-order optimizer. Generated by cbindgen; do not edit. */

#ifndef AHOM_H
#define AHOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How the cubic-regularized subproblem is minimized.
 */
typedef enum AhomMode {
  /**
   * Eigendecomposition-based global minimizer.
   */
  AHOM_MODE_EXACT = 0,
  /**
   * Lanczos subspace minimizer (the default).
   */
  AHOM_MODE_KRYLOV = 1,
} AhomMode;

/**
 * Outcome code of a C-API call.
 */
typedef enum AhomStatus {
  /**
   * The call succeeded.
   */
  AHOM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  AHOM_STATUS_NULL_ARGUMENT = 1,
  /**
   * A scalar argument was out of range (zero dimension, bad tolerance,
   * negative regularization, …).
   */
  AHOM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A path was not valid UTF-8.
   */
  AHOM_STATUS_BAD_UTF8 = 3,
  /**
   * A dataset file could not be read or parsed.
   */
  AHOM_STATUS_DATASET_UNREADABLE = 4,
  /**
   * A buffer length did not match the problem dimension.
   */
  AHOM_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * A point contained NaN or infinite coordinates.
   */
  AHOM_STATUS_NON_FINITE_INPUT = 6,
  /**
   * The solver panicked; the handle is untouched.
   */
  AHOM_STATUS_INTERNAL_ERROR = 7,
} AhomStatus;

/**
 * Which optimizer [`ahom_solve`] runs.
 */
typedef enum AhomAlgorithm {
  /**
   * Armijo backtracking gradient descent.
   */
  AHOM_ALGORITHM_GRADIENT_DESCENT = 0,
  /**
   * Adaptive cubic-regularized Newton.
   */
  AHOM_ALGORITHM_ARC = 1,
  /**
   * Trust-region Newton with a truncated-CG subproblem.
   */
  AHOM_ALGORITHM_TRUST_REGION = 2,
  /**
   * The third-order method: cubic-regularized steps plus tensor escapes.
   */
  AHOM_ALGORITHM_HIGH_ORDER = 3,
} AhomAlgorithm;

/**
 * Terminal state of a finished run.
 */
typedef enum AhomRunStatus {
  /**
   * Every criticality tolerance was met.
   */
  AHOM_RUN_STATUS_CONVERGED = 0,
  /**
   * The iteration or wall-time budget ran out first.
   */
  AHOM_RUN_STATUS_BUDGET_EXHAUSTED = 1,
} AhomRunStatus;

/**
 * An objective the solvers can run on. Opaque; create with one of the
 * `ahom_problem_*` constructors and release with [`ahom_problem_free`].
 */
typedef struct AhomProblem AhomProblem;

/**
 * A finished optimization run. Opaque; produced by [`ahom_solve`] and
 * released with [`ahom_run_free`].
 */
typedef struct AhomRun AhomRun;

/**
 * Solver options shared by all four algorithms. Obtain defaults from
 * [`ahom_options_default`] and override fields as needed; tolerances the
 * second-order baselines do not use (`eps3`) are ignored by them.
 */
typedef struct AhomOptions {
  /**
   * Subproblem solver for the cubic-regularized algorithms.
   */
  enum AhomMode mode;
  /**
   * Gradient-norm tolerance.
   */
  double eps1;
  /**
   * Negative-curvature tolerance.
   */
  double eps2;
  /**
   * Projected third-derivative tolerance (high-order method only).
   */
  double eps3;
  /**
   * Iteration budget.
   */
  uint64_t max_iters;
  /**
   * Wall-clock budget in seconds.
   */
  double max_time_s;
  /**
   * Seed for the run's private generator.
   */
  uint64_t seed;
} AhomOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: Krylov mode, 1e-6 tolerances, 5000 iterations, 600 s,
 * seed 0.
 */
struct AhomOptions ahom_options_default(void);

/**
 * Static description of a status code. Never null; do not free.
 */
const char *ahom_status_message(enum AhomStatus status);

/**
 * The two-dimensional monkey saddle, a cubic whose origin defeats
 * second-order methods. Caller owns the returned handle.
 */
struct AhomProblem *ahom_problem_monkey(void);

/**
 * The two-dimensional quartic well whose basin ends in a degenerate
 * critical point. Caller owns the returned handle.
 */
struct AhomProblem *ahom_problem_coercive(void);

/**
 * The `dim`-dimensional quadratic bowl. Returns null when `dim` is zero.
 */
struct AhomProblem *ahom_problem_quadratic(size_t dim);

/**
 * Ridge-regularized logistic regression on a synthetic two-class dataset
 * of `samples` rows and `features` columns drawn from `seed`. On success
 * writes a caller-owned handle to `out`.
 */
enum AhomStatus ahom_problem_logistic_synthetic(size_t samples,
                                                size_t features,
                                                uint64_t seed,
                                                double alpha,
                                                struct AhomProblem **out);

/**
 * Ridge-regularized logistic regression on a LIBSVM-format file. On
 * success writes a caller-owned handle to `out`.
 */
enum AhomStatus ahom_problem_logistic_file(const char *path,
                                           double alpha,
                                           struct AhomProblem **out);

/**
 * Dimension of a problem's variable vector; 0 for a null handle.
 */
size_t ahom_problem_dim(const struct AhomProblem *problem);

/**
 * Objective value at `x` (length `dim`), written to `out_value`.
 */
enum AhomStatus ahom_problem_value(const struct AhomProblem *problem,
                                   const double *x,
                                   size_t dim,
                                   double *out_value);

/**
 * Gradient at `x`, written to `out_gradient` (both length `dim`).
 */
enum AhomStatus ahom_problem_gradient(const struct AhomProblem *problem,
                                      const double *x,
                                      size_t dim,
                                      double *out_gradient);

/**
 * Releases a problem handle. Null is a harmless no-op.
 */
void ahom_problem_free(struct AhomProblem *problem);

/**
 * Runs an optimizer on a problem. `x0` may be null to start from the
 * problem's standard initial point; otherwise it must hold `x0_len`
 * finite coordinates matching the problem dimension. `options` may be
 * null for defaults. On success writes a caller-owned run handle to
 * `out`.
 */
enum AhomStatus ahom_solve(const struct AhomProblem *problem,
                           enum AhomAlgorithm algorithm,
                           const double *x0,
                           size_t x0_len,
                           const struct AhomOptions *options,
                           struct AhomRun **out);

/**
 * Terminal status of a run; budget-exhausted for a null handle.
 */
enum AhomRunStatus ahom_run_status(const struct AhomRun *run);

/**
 * Final objective value; NaN for a null handle.
 */
double ahom_run_value(const struct AhomRun *run);

/**
 * Number of recorded iterations; 0 for a null handle.
 */
size_t ahom_run_iterations(const struct AhomRun *run);

/**
 * Dimension of the run's final point; 0 for a null handle.
 */
size_t ahom_run_dim(const struct AhomRun *run);

/**
 * Copies the final point into `out` (length `len`, which must equal the
 * run's dimension).
 */
enum AhomStatus ahom_run_solution(const struct AhomRun *run, double *out, size_t len);

/**
 * Releases a run handle. Null is a harmless no-op.
 */
void ahom_run_free(struct AhomRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AHOM_H */
