//! Lifts of planar solutions to U(1)-invariant 3-folds in `C³`, checks of
//! the special Lagrangian conditions, closed-form examples, and fibrations.

mod calibration;
mod examples;
mod explicit;
mod family;
mod lift;

use thiserror::Error;

use crate::solver::{FamilyParams, SolveError};

pub use calibration::{
    big_omega, frame_residuals, frame_volume, omega, patch_frame, sl_residual, CalibrationEval, Tangent,
    DEGENERATE_VOLUME,
};
pub use examples::{hl_defect, hl_patch, sampler_hl, AnalyticExample};
pub use explicit::{
    fibration_map_explicit, fibre_patch, fibre_point, fibre_sample, seam_continuity, SeamReport, FIBRE_RADIUS, ROUND_TRIP_TOL,
};
pub use family::{
    build_fibration, check_disjointness, DisjointnessReport, FibrationFamily, FibrationMember, PairCheck,
    Separation, DISJOINT_FLOOR, EXTREMUM_SAMPLES,
};
pub use lift::{lift_mesh, lift_point, lift_radii, C3Point, MeshPatch};

#[derive(Debug, Error)]
pub enum CliftError {
    #[error("expected {expected} points, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown example {0:?}")]
    UnknownName(String),
    #[error("fibre sample at a = {a} misses its fibre by {error:.3e}")]
    RoundTripFailed { a: f64, error: f64 },
    #[error("boundary data of {first:?} and {second:?} differ by a function with {extrema:?} maxima, need 1")]
    ExtremumConditionFailed {
        first: FamilyParams,
        second: FamilyParams,
        extrema: Option<usize>,
    },
    #[error("{} family member(s) failed to solve", .0.len())]
    MemberSolve(Vec<(FamilyParams, SolveError)>),
}
