//! Run configuration, artifact writers and the subcommand implementations
//! behind the `slfib` binary.

mod commands;
mod config;
mod write;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::clift::CliftError;
use crate::solver::SolveError;

pub use commands::{
    cmd_analyze, cmd_export, cmd_fibrate, cmd_solve, run_validation, seam_gaps, seam_ok, AnalysisSummary,
    CheckOutcome, ExplicitSummary, ExportSummary, FamilySummary, Fault, FibrationSummary, FibreSummary,
    MemberSummary, Report, SolveSummary, SEAM_ORDER_MIN, VALIDATION_CHECKS,
};
pub use config::{
    AnalysisConfig, BoundaryConfig, FibrationConfig, FibrationMode, GridConfig, OutputConfig, Overrides, RunConfig,
    SolveConfig,
};
pub use write::{
    field_csv, mesh_csv, mesh_obj, read_field_csv, write_field_csv, write_json, write_mesh_csv, write_mesh_obj,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed artifact: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Clift(#[from] CliftError),
}

impl IoError {
    /// 2 for configuration problems, 3 for numerical or runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            IoError::Config(_) => 2,
            IoError::Clift(CliftError::InvalidParameter(_) | CliftError::ExtremumConditionFailed { .. }) => 2,
            IoError::Solve(SolveError::InvalidOptions(_)) => 2,
            _ => 3,
        }
    }
}
