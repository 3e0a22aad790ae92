//! C ABI over `slfib`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `slfib_solve` and released with the matching `*_free`. Every fallible
//! call returns an [`SlfibStatus`]; on failure a description is kept per
//! thread and can be read with [`slfib_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use slfib::analysis::{find_singularities, Singularities, SingularityKind};
use slfib::boundary::BoundaryFunction;
use slfib::clift::{fibration_map_explicit, lift_point, C3Point};
use slfib::domain::{make_domain, DomainParams};
use slfib::grid::{build_grid, Grid};
use num_complex::Complex64;
use slfib::solver::{solve_at, SolutionTriple, SolveError, SolveOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlfibStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    SolveFailed = 4,
    AnalysisFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlfibFieldKind {
    Potential = 0,
    U = 1,
    V = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlfibSingularityKind {
    Increasing = 0,
    Decreasing = 1,
    Maximum = 2,
    Minimum = 3,
}

/// Point of `C³` as six reals `(Re z₁, Im z₁, Re z₂, Im z₂, Re z₃, Im z₃)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlfibPoint {
    pub coords: [f64; 6],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlfibSingularity {
    pub b: f64,
    pub multiplicity: i32,
    pub kind: SlfibSingularityKind,
}

/// Newton and continuation settings; start from
/// [`slfib_solve_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlfibSolveOptions {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub max_halvings: usize,
    pub a_start: f64,
    pub continuation_factor: f64,
    pub a_floor: f64,
    pub cauchy_tol: f64,
    pub cauchy_slack: f64,
}

impl From<SlfibSolveOptions> for SolveOptions {
    fn from(o: SlfibSolveOptions) -> Self {
        SolveOptions {
            newton_tol: o.newton_tol,
            max_newton_iters: o.max_newton_iters,
            max_halvings: o.max_halvings,
            a_start: o.a_start,
            continuation_factor: o.continuation_factor,
            a_floor: o.a_floor,
            cauchy_tol: o.cauchy_tol,
            cauchy_slack: o.cauchy_slack,
        }
    }
}

/// Cut-cell grid on a validated domain.
pub struct SlfibGrid(Arc<Grid>);

/// Dirichlet data on the domain boundary.
pub struct SlfibBoundary(BoundaryFunction);

/// Solution `(f, u, v)` at one value of `a`.
pub struct SlfibSolution(SolutionTriple);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: SlfibStatus, msg: impl Into<String>) -> SlfibStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SlfibStatus) -> SlfibStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SlfibStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Description of the last failure on this thread, or null. The pointer
/// stays valid until the next `slfib_*` call on the same thread.
#[no_mangle]
pub extern "C" fn slfib_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn slfib_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Grid of spacing `h` on the ellipse `x²/p² + y²/q² ≤ 1`.
#[no_mangle]
pub extern "C" fn slfib_grid_new_ellipse(p: f64, q: f64, h: f64, out: *mut *mut SlfibGrid) -> SlfibStatus {
    guard(|| {
        if out.is_null() {
            return fail(SlfibStatus::NullPointer, "out is null");
        }
        let domain = match make_domain(&DomainParams::Ellipse { semi_axes: [p, q] }) {
            Ok(d) => d,
            Err(e) => return fail(SlfibStatus::InvalidArgument, e.to_string()),
        };
        match build_grid(&domain, h) {
            Ok(g) => {
                put(out, SlfibGrid(g));
                SlfibStatus::Ok
            }
            Err(e) => fail(SlfibStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `grid` must be null or a handle from `slfib_grid_new_ellipse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn slfib_grid_free(grid: *mut SlfibGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of interior nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn slfib_grid_node_count(grid: *const SlfibGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of field values (interior nodes followed by boundary hits).
///
/// # Safety
/// `grid` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn slfib_grid_value_count(grid: *const SlfibGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.value_count())
}

/// Writes the `(x, y)` position of every field value into `xs`, `ys`, each
/// of length at least `slfib_grid_value_count`.
///
/// # Safety
/// `xs` and `ys` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn slfib_grid_positions(
    grid: *const SlfibGrid,
    xs: *mut f64,
    ys: *mut f64,
    len: usize,
) -> SlfibStatus {
    guard(|| {
        let Some(g) = grid.as_ref() else {
            return fail(SlfibStatus::NullPointer, "grid is null");
        };
        if xs.is_null() || ys.is_null() {
            return fail(SlfibStatus::NullPointer, "output buffer is null");
        }
        let n = g.0.value_count();
        if len < n {
            return fail(SlfibStatus::BufferTooSmall, format!("need {n} entries, got {len}"));
        }
        let (xs, ys) = (slice::from_raw_parts_mut(xs, n), slice::from_raw_parts_mut(ys, n));
        for s in 0..n {
            (xs[s], ys[s]) = g.0.slot_position(s);
        }
        SlfibStatus::Ok
    })
}

/// `φ(θ) = Σ cos[j] cos jθ + Σ sin[j] sin jθ`. Either array may be null
/// when its length is 0.
///
/// # Safety
/// `cos` and `sin` must point to `n_cos` and `n_sin` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn slfib_boundary_new_trig(
    cos: *const f64,
    n_cos: usize,
    sin: *const f64,
    n_sin: usize,
    out: *mut *mut SlfibBoundary,
) -> SlfibStatus {
    guard(|| {
        if out.is_null() || (cos.is_null() && n_cos > 0) || (sin.is_null() && n_sin > 0) {
            return fail(SlfibStatus::NullPointer, "null coefficient array or out pointer");
        }
        let read = |p: *const f64, n: usize| if n == 0 { vec![] } else { slice::from_raw_parts(p, n).to_vec() };
        let (c, s) = (read(cos, n_cos), read(sin, n_sin));
        if c.iter().chain(&s).any(|v| !v.is_finite()) {
            return fail(SlfibStatus::InvalidArgument, "coefficients must be finite");
        }
        put(out, SlfibBoundary(BoundaryFunction::trig(c, s)));
        SlfibStatus::Ok
    })
}

/// Adds `b·x + c·y` to the boundary data in place.
///
/// # Safety
/// `phi` must be null or a live boundary handle.
#[no_mangle]
pub unsafe extern "C" fn slfib_boundary_add_affine(phi: *mut SlfibBoundary, b: f64, c: f64) -> SlfibStatus {
    guard(|| {
        let Some(phi) = phi.as_mut() else {
            return fail(SlfibStatus::NullPointer, "phi is null");
        };
        phi.0 = phi.0.with_affine(b, c);
        SlfibStatus::Ok
    })
}

/// # Safety
/// `phi` must be null or a boundary handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn slfib_boundary_free(phi: *mut SlfibBoundary) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

#[no_mangle]
pub extern "C" fn slfib_solve_options_default() -> SlfibSolveOptions {
    let o = SolveOptions::default();
    SlfibSolveOptions {
        newton_tol: o.newton_tol,
        max_newton_iters: o.max_newton_iters,
        max_halvings: o.max_halvings,
        a_start: o.a_start,
        continuation_factor: o.continuation_factor,
        a_floor: o.a_floor,
        cauchy_tol: o.cauchy_tol,
        cauchy_slack: o.cauchy_slack,
    }
}

/// Solves the Dirichlet problem at `a`; `a = 0` runs continuation down to
/// `a_floor`. `opts` may be null for defaults.
///
/// # Safety
/// Handles must be live; `opts` must be null or readable.
#[no_mangle]
pub unsafe extern "C" fn slfib_solve(
    grid: *const SlfibGrid,
    phi: *const SlfibBoundary,
    a: f64,
    opts: *const SlfibSolveOptions,
    out: *mut *mut SlfibSolution,
) -> SlfibStatus {
    guard(|| {
        let (Some(g), Some(phi)) = (grid.as_ref(), phi.as_ref()) else {
            return fail(SlfibStatus::NullPointer, "grid or phi is null");
        };
        if out.is_null() {
            return fail(SlfibStatus::NullPointer, "out is null");
        }
        let opts: SolveOptions = opts.as_ref().map_or_else(SolveOptions::default, |o| (*o).into());
        match solve_at(&g.0, &phi.0, a, &opts) {
            Ok(sol) => {
                put(out, SlfibSolution(sol));
                SlfibStatus::Ok
            }
            Err(e @ SolveError::InvalidOptions(_)) => fail(SlfibStatus::InvalidArgument, e.to_string()),
            Err(e) => fail(SlfibStatus::SolveFailed, e.to_string()),
        }
    })
}

/// # Safety
/// `sol` must be null or a solution handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn slfib_solution_free(sol: *mut SlfibSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// `a` at which the solution was computed (`a_floor` for continuation
/// results), or NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn slfib_solution_a(sol: *const SlfibSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.a)
}

/// Whether the solution stands in for `a = 0`.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn slfib_solution_is_singular(sol: *const SlfibSolution) -> bool {
    sol.as_ref().is_some_and(|s| s.0.singular)
}

/// Copies `f`, `u` or `v` (in grid value order) into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn slfib_solution_field(
    sol: *const SlfibSolution,
    kind: SlfibFieldKind,
    buf: *mut f64,
    len: usize,
) -> SlfibStatus {
    guard(|| {
        let Some(sol) = sol.as_ref() else {
            return fail(SlfibStatus::NullPointer, "solution is null");
        };
        if buf.is_null() {
            return fail(SlfibStatus::NullPointer, "buffer is null");
        }
        let field = match kind {
            SlfibFieldKind::Potential => &sol.0.f,
            SlfibFieldKind::U => &sol.0.u,
            SlfibFieldKind::V => &sol.0.v,
        };
        let vals = field.values();
        if len < vals.len() {
            return fail(SlfibStatus::BufferTooSmall, format!("need {} entries, got {len}", vals.len()));
        }
        slice::from_raw_parts_mut(buf, vals.len()).copy_from_slice(vals);
        SlfibStatus::Ok
    })
}

/// Singularities of a (singular) solution. Sets `*is_line` when the whole
/// x-axis is singular; otherwise writes up to `cap` records and the total
/// count to `*count`. Returns `BufferTooSmall` if `*count > cap`.
///
/// # Safety
/// `records` must point to `cap` writable records (may be null if `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn slfib_find_singularities(
    sol: *const SlfibSolution,
    a_floor: f64,
    is_line: *mut bool,
    records: *mut SlfibSingularity,
    cap: usize,
    count: *mut usize,
) -> SlfibStatus {
    guard(|| {
        let Some(sol) = sol.as_ref() else {
            return fail(SlfibStatus::NullPointer, "solution is null");
        };
        if is_line.is_null() || count.is_null() || (records.is_null() && cap > 0) {
            return fail(SlfibStatus::NullPointer, "null output pointer");
        }
        let found = match find_singularities(&sol.0.pair(), a_floor) {
            Ok(s) => s,
            Err(e) => return fail(SlfibStatus::AnalysisFailed, e.to_string()),
        };
        match found {
            Singularities::NonisolatedLine { .. } => {
                *is_line = true;
                *count = 0;
                SlfibStatus::Ok
            }
            Singularities::Isolated { records: recs } => {
                *is_line = false;
                *count = recs.len();
                for (k, r) in recs.iter().take(cap).enumerate() {
                    *records.add(k) = SlfibSingularity {
                        b: r.b,
                        multiplicity: r.multiplicity,
                        kind: match r.kind {
                            SingularityKind::Increasing => SlfibSingularityKind::Increasing,
                            SingularityKind::Decreasing => SlfibSingularityKind::Decreasing,
                            SingularityKind::Maximum => SlfibSingularityKind::Maximum,
                            SingularityKind::Minimum => SlfibSingularityKind::Minimum,
                        },
                    };
                }
                if recs.len() > cap {
                    fail(SlfibStatus::BufferTooSmall, format!("{} records, capacity {cap}", recs.len()))
                } else {
                    SlfibStatus::Ok
                }
            }
        }
    })
}

/// Point over `(x, y)` with values `(u, v)` at orbit angle `theta` on the
/// level `|z₁|² − |z₂|² = 2a`.
#[no_mangle]
pub extern "C" fn slfib_lift_point(x: f64, y: f64, u: f64, v: f64, a: f64, theta: f64) -> SlfibPoint {
    SlfibPoint {
        coords: lift_point(x, y, u, v, a, theta).reals(),
    }
}

/// The explicit fibration `F(z) = (a, b)`; writes `a` and `b = b_re + i b_im`.
///
/// # Safety
/// `p` must be readable; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn slfib_fibration_map(
    p: *const SlfibPoint,
    a: *mut f64,
    b_re: *mut f64,
    b_im: *mut f64,
) -> SlfibStatus {
    guard(|| {
        let Some(p) = p.as_ref() else {
            return fail(SlfibStatus::NullPointer, "point is null");
        };
        if a.is_null() || b_re.is_null() || b_im.is_null() {
            return fail(SlfibStatus::NullPointer, "null output pointer");
        }
        let c = p.coords;
        let z = C3Point::new(
            Complex64::new(c[0], c[1]),
            Complex64::new(c[2], c[3]),
            Complex64::new(c[4], c[5]),
        );
        let (fa, fb) = fibration_map_explicit(&z);
        *a = fa;
        *b_re = fb.re;
        *b_im = fb.im;
        SlfibStatus::Ok
    })
}
