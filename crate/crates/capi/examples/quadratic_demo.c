/* Minimal consumer of the C API: build the quadratic bowl, run two of the
 * optimizers on it, and print where they land.
 *
 *   cc quadratic_demo.c -I../include -L../../../target/release \
 *      -lahom_capi -lm && ./a.out
 */
#include <stdio.h>

#include "ahom.h"

static int run_and_report(const AhomProblem *problem, AhomAlgorithm algorithm,
                          const char *name) {
  AhomRun *run = NULL;
  AhomStatus status =
      ahom_solve(problem, algorithm, NULL, 0, NULL, &run);
  if (status != AHOM_STATUS_OK) {
    fprintf(stderr, "%s failed: %s\n", name, ahom_status_message(status));
    return 1;
  }
  double x[4];
  if (ahom_run_solution(run, x, 4) != AHOM_STATUS_OK) {
    ahom_run_free(run);
    return 1;
  }
  printf("%s: f = %.3e after %zu iterations, x = (%.2e, %.2e, %.2e, %.2e), %s\n",
         name, ahom_run_value(run), ahom_run_iterations(run), x[0], x[1], x[2],
         x[3],
         ahom_run_status(run) == AHOM_RUN_STATUS_CONVERGED ? "converged"
                                                           : "budget exhausted");
  ahom_run_free(run);
  return 0;
}

int main(void) {
  AhomProblem *problem = ahom_problem_quadratic(4);
  if (problem == NULL) {
    fprintf(stderr, "constructor refused a 4-dimensional bowl\n");
    return 1;
  }

  int failures = 0;
  failures += run_and_report(problem, AHOM_ALGORITHM_GRADIENT_DESCENT, "gd");
  failures += run_and_report(problem, AHOM_ALGORITHM_HIGH_ORDER, "high-order");

  ahom_problem_free(problem);
  return failures;
}
