//! Winding numbers, zeros of solution differences with multiplicities,
//! singular points and the counting bounds relating them to boundary data.

mod extrema;
mod singular;
mod winding;
mod zeros;

use thiserror::Error;

pub use extrema::{
    check_bounds, check_singularity_bounds, count_boundary_extrema, count_cyclic_extrema, BoundsReport,
    MIN_EXTREMA_SAMPLES,
};
pub use singular::{
    classify_singularity_type, find_singularities, reflect_solution, Singularities, SingularityKind,
    SingularityRecord, SYMMETRY_TOL,
};
pub use winding::{
    circle_winding, hull_excludes_origin, polyline_winding, sample_loop, winding_number, Contour, LoopSamples,
    MIN_LOOP_SAMPLES,
};
pub use zeros::{
    find_zeros, find_zeros_with, leading_order_fit, multiplicity_at, LeadingOrderFit, ZeroRecord, ZeroSearch,
    CLUSTER_SPACINGS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("loop needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("vector field vanishes on the contour (sample {sample})")]
    ZeroOnContour { sample: usize },
    #[error("contour under-resolved: angle increment {increment:.3}")]
    UnderResolved { increment: f64 },
    #[error("contour leaves the interpolation region")]
    OutsideRegion,
    #[error("difference vanishes on the boundary at ({x:.4}, {y:.4})")]
    ZeroOnBoundary { x: f64, y: f64 },
    #[error("solutions are identical (difference sup-norm {sup:.3e})")]
    IdenticalSolutions { sup: f64 },
    #[error("boundary winding {boundary} differs from summed multiplicities {interior}")]
    WindingMismatch { boundary: i32, interior: i32 },
    #[error("winding changes between radii: {outer} vs {inner}")]
    Unstable { outer: i32, inner: i32 },
    #[error("center is not a zero (winding 0)")]
    NotAZero,
    #[error("zero is singular (lambda = {lambda:.3e})")]
    SingularZero { lambda: f64 },
    #[error("normal-form fit residual {residual:.3} too large")]
    FitPoor { residual: f64 },
    #[error("sign of v(x,0) near x = {b:.4} is ambiguous within {probe:.4}")]
    AmbiguousSign { b: f64, probe: f64 },
    #[error("boundary function is constant")]
    FlatBoundary,
    #[error("pairs live on different grids")]
    GridMismatch,
    #[error("pairs have different a: {a1} vs {a2}")]
    ParameterMismatch { a1: f64, a2: f64 },
}
