#ifndef SLFIB_H
#define SLFIB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlfibFieldKind {
  SLFIB_FIELD_KIND_POTENTIAL = 0,
  SLFIB_FIELD_KIND_U = 1,
  SLFIB_FIELD_KIND_V = 2,
} SlfibFieldKind;

typedef enum SlfibSingularityKind {
  SLFIB_SINGULARITY_KIND_INCREASING = 0,
  SLFIB_SINGULARITY_KIND_DECREASING = 1,
  SLFIB_SINGULARITY_KIND_MAXIMUM = 2,
  SLFIB_SINGULARITY_KIND_MINIMUM = 3,
} SlfibSingularityKind;

typedef enum SlfibStatus {
  SLFIB_STATUS_OK = 0,
  SLFIB_STATUS_NULL_POINTER = 1,
  SLFIB_STATUS_INVALID_ARGUMENT = 2,
  SLFIB_STATUS_BUFFER_TOO_SMALL = 3,
  SLFIB_STATUS_SOLVE_FAILED = 4,
  SLFIB_STATUS_ANALYSIS_FAILED = 5,
  SLFIB_STATUS_PANIC = 6,
} SlfibStatus;

/**
 * Dirichlet data on the domain boundary.
 */
typedef struct SlfibBoundary SlfibBoundary;

/**
 * Cut-cell grid on a validated domain.
 */
typedef struct SlfibGrid SlfibGrid;

/**
 * Solution `(f, u, v)` at one value of `a`.
 */
typedef struct SlfibSolution SlfibSolution;

/**
 * Newton and continuation settings; start from
 * [`slfib_solve_options_default`].
 */
typedef struct SlfibSolveOptions {
  double newton_tol;
  size_t max_newton_iters;
  size_t max_halvings;
  double a_start;
  double continuation_factor;
  double a_floor;
  double cauchy_tol;
  double cauchy_slack;
} SlfibSolveOptions;

typedef struct SlfibSingularity {
  double b;
  int32_t multiplicity;
  enum SlfibSingularityKind kind;
} SlfibSingularity;

/**
 * Point of `C³` as six reals `(Re z₁, Im z₁, Re z₂, Im z₂, Re z₃, Im z₃)`.
 */
typedef struct SlfibPoint {
  double coords[6];
} SlfibPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null. The pointer
 * stays valid until the next `slfib_*` call on the same thread.
 */
const char *slfib_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *slfib_version(void);

/**
 * Grid of spacing `h` on the ellipse `x²/p² + y²/q² ≤ 1`.
 */
enum SlfibStatus slfib_grid_new_ellipse(double p, double q, double h, struct SlfibGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from `slfib_grid_new_ellipse` not yet freed.
 */
void slfib_grid_free(struct SlfibGrid *grid);

/**
 * Number of interior nodes, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t slfib_grid_node_count(const struct SlfibGrid *grid);

/**
 * Number of field values (interior nodes followed by boundary hits).
 *
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t slfib_grid_value_count(const struct SlfibGrid *grid);

/**
 * Writes the `(x, y)` position of every field value into `xs`, `ys`, each
 * of length at least `slfib_grid_value_count`.
 *
 * # Safety
 * `xs` and `ys` must point to `len` writable doubles.
 */
enum SlfibStatus slfib_grid_positions(const struct SlfibGrid *grid,
                                      double *xs,
                                      double *ys,
                                      size_t len);

/**
 * `φ(θ) = Σ cos[j] cos jθ + Σ sin[j] sin jθ`. Either array may be null
 * when its length is 0.
 *
 * # Safety
 * `cos` and `sin` must point to `n_cos` and `n_sin` readable doubles.
 */
enum SlfibStatus slfib_boundary_new_trig(const double *cos,
                                         size_t n_cos,
                                         const double *sin,
                                         size_t n_sin,
                                         struct SlfibBoundary **out);

/**
 * Adds `b·x + c·y` to the boundary data in place.
 *
 * # Safety
 * `phi` must be null or a live boundary handle.
 */
enum SlfibStatus slfib_boundary_add_affine(struct SlfibBoundary *phi, double b, double c);

/**
 * # Safety
 * `phi` must be null or a boundary handle not yet freed.
 */
void slfib_boundary_free(struct SlfibBoundary *phi);

struct SlfibSolveOptions slfib_solve_options_default(void);

/**
 * Solves the Dirichlet problem at `a`; `a = 0` runs continuation down to
 * `a_floor`. `opts` may be null for defaults.
 *
 * # Safety
 * Handles must be live; `opts` must be null or readable.
 */
enum SlfibStatus slfib_solve(const struct SlfibGrid *grid,
                             const struct SlfibBoundary *phi,
                             double a,
                             const struct SlfibSolveOptions *opts,
                             struct SlfibSolution **out);

/**
 * # Safety
 * `sol` must be null or a solution handle not yet freed.
 */
void slfib_solution_free(struct SlfibSolution *sol);

/**
 * `a` at which the solution was computed (`a_floor` for continuation
 * results), or NaN for a null handle.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
double slfib_solution_a(const struct SlfibSolution *sol);

/**
 * Whether the solution stands in for `a = 0`.
 *
 * # Safety
 * `sol` must be null or a live solution handle.
 */
bool slfib_solution_is_singular(const struct SlfibSolution *sol);

/**
 * Copies `f`, `u` or `v` (in grid value order) into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
enum SlfibStatus slfib_solution_field(const struct SlfibSolution *sol,
                                      enum SlfibFieldKind kind,
                                      double *buf,
                                      size_t len);

/**
 * Singularities of a (singular) solution. Sets `*is_line` when the whole
 * x-axis is singular; otherwise writes up to `cap` records and the total
 * count to `*count`. Returns `BufferTooSmall` if `*count > cap`.
 *
 * # Safety
 * `records` must point to `cap` writable records (may be null if `cap` is 0).
 */
enum SlfibStatus slfib_find_singularities(const struct SlfibSolution *sol,
                                          double a_floor,
                                          bool *is_line,
                                          struct SlfibSingularity *records,
                                          size_t cap,
                                          size_t *count);

/**
 * Point over `(x, y)` with values `(u, v)` at orbit angle `theta` on the
 * level `|z₁|² − |z₂|² = 2a`.
 */
struct SlfibPoint slfib_lift_point(double x, double y, double u, double v, double a, double theta);

/**
 * The explicit fibration `F(z) = (a, b)`; writes `a` and `b = b_re + i b_im`.
 *
 * # Safety
 * `p` must be readable; the outputs must be writable.
 */
enum SlfibStatus slfib_fibration_map(const struct SlfibPoint *p,
                                     double *a,
                                     double *b_re,
                                     double *b_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLFIB_H */
