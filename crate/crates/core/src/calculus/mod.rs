//! Difference operators, residuals of the governing equations, weak-form
//! residuals and potential recovery on cut-cell grids.

mod diff;
mod fields;
mod recover;
mod residuals;
mod weak;

use thiserror::Error;

pub use diff::{diff_x, diff_xx, diff_y, diff_yy, Axis, Stencil1d, Stencils};
pub use fields::{GridField, NormSummary, PairField};
pub use recover::{integrate_gradient, path_tolerance, recover_f, recover_u_from_v, Recovered};
pub use residuals::{
    residual_pair, residual_pair_with, residual_potential, residual_v_divergence,
    singular_threshold, PairResidual, DEFAULT_A_FLOOR,
};
pub use weak::{bump_test_functions, weak_residual_v, WeakResidual, TEST_BOUNDARY_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("test function {0} does not vanish on the boundary")]
    TestNotVanishing(usize),
    #[error("gradient field is not integrable: path error {error:.3e} > {tolerance:.3e}")]
    NotIntegrable { error: f64, tolerance: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("anchor {0} is not an interior node")]
    BadAnchor(usize),
    #[error("operation requires a != 0")]
    SingularParameter,
}
