#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "slfib.h"

int main(void) {
    SlfibGrid *grid = NULL;
    if (slfib_grid_new_ellipse(1.0, 1.0, 0.1, &grid) != SLFIB_STATUS_OK) {
        fprintf(stderr, "grid: %s\n", slfib_last_error());
        return 1;
    }
    double cosc[3] = {0.0, 0.0, 1.0};
    SlfibBoundary *phi = NULL;
    slfib_boundary_new_trig(cosc, 3, NULL, 0, &phi);
    SlfibSolution *sol = NULL;
    if (slfib_solve(grid, phi, 1.0, NULL, &sol) != SLFIB_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", slfib_last_error());
        return 1;
    }
    size_t n = slfib_grid_value_count(grid);
    double *f = malloc(n * sizeof(double));
    if (slfib_solution_field(sol, SLFIB_FIELD_KIND_POTENTIAL, f, n) != SLFIB_STATUS_OK) return 1;
    double lo = 1e300, hi = -1e300;
    for (size_t k = 0; k < n; k++) {
        lo = f[k] < lo ? f[k] : lo;
        hi = f[k] > hi ? f[k] : hi;
    }
    if (slfib_solution_field(sol, SLFIB_FIELD_KIND_U, f, 1) != SLFIB_STATUS_BUFFER_TOO_SMALL) return 1;
    if (slfib_last_error() == NULL) return 1;
    printf("values %zu range %.6f %.6f\n", n, lo, hi);
    free(f);
    slfib_solution_free(sol);
    slfib_boundary_free(phi);
    slfib_grid_free(grid);
    return (lo >= -1.0 - 1e-8 && hi <= 1.0 + 1e-8) ? 0 : 1;
}
