/* Solve the first built-in example and print u on a coarse grid. */
#include <stdio.h>
#include "fracpicard.h"

int main(void) {
    FpProblem *p = NULL;
    FpSolution *s = NULL;
    if (fp_problem_example1(0.5, 0.05, 0.1, 0.0, &p) != FP_STATUS_OK) {
        fprintf(stderr, "%s\n", fp_last_error());
        return 1;
    }
    FpSolverOptions opts = fp_solver_options_default();
    if (fp_solve(p, &opts, &s) != FP_STATUS_OK) {
        fprintf(stderr, "%s\n", fp_last_error());
        fp_problem_free(p);
        return 1;
    }
    printf("iterations: %zu\n", fp_solution_iterations(s));
    for (int i = 0; i <= 4; i++) {
        double t = -1.0 + 0.5 * i, re, im;
        fp_solution_eval(s, t, &re, &im);
        printf("u(%g) = %.17g%+.17gi\n", t, re, im);
    }
    fp_solution_free(s);
    fp_problem_free(p);
    return 0;
}
