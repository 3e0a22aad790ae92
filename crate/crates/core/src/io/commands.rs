//! Implementations of the `slfib` subcommands. Each returns the artifacts
//! it wrote and a verdict; the binary maps errors to exit codes.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{FibrationMode, RunConfig};
use super::write::{read_field_csv, write_field_csv, write_json, write_mesh_csv, write_mesh_obj};
use super::IoError;
use crate::analysis::{check_singularity_bounds, count_boundary_extrema, find_singularities, BoundsReport, Singularities};
use crate::boundary::BoundaryFunction;
use crate::calculus::{residual_pair, PairField};
use crate::clift::{
    build_fibration, check_disjointness, fibration_map_explicit, fibre_patch, fibre_point, fibre_sample, hl_patch,
    lift_mesh, seam_continuity, sl_residual, AnalyticExample, CalibrationEval, DisjointnessReport, SeamReport,
    FIBRE_RADIUS, ROUND_TRIP_TOL,
};
use crate::grid::{build_grid, Grid};
use crate::solver::{check_maximum_principle, solve_at, ConvergenceLog, FamilyParams, MaxPrincipleReport, SolutionTriple};

/// Minimum observed order of the seam discrepancy.
pub const SEAM_ORDER_MIN: f64 = 0.95;

/// Deliberate defects for exercising the validation suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flips the sign of `v` in the catenoid fixture.
    CatenoidVSign,
}

impl std::str::FromStr for Fault {
    type Err = IoError;
    fn from_str(s: &str) -> Result<Self, IoError> {
        match s {
            "catenoid-v-sign" => Ok(Fault::CatenoidVSign),
            _ => Err(IoError::Config(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const VALIDATION_CHECKS: [&str; 8] = [
    "residual_pair:linear",
    "residual_pair:catenoid",
    "residual_pair:twosheet",
    "sl_residual:linear",
    "sl_residual:catenoid",
    "sl_residual:harvey-lawson",
    "fibration:round-trip",
    "fibration:seam",
];

const LINEAR: AnalyticExample = AnalyticExample::Linear {
    alpha: 0.3,
    beta: -0.2,
    gamma: 0.7,
};

fn fixture(grid: &Arc<Grid>, ex: AnalyticExample, a: f64, fault: Option<Fault>) -> PairField {
    let flip = ex == AnalyticExample::Catenoid && fault == Some(Fault::CatenoidVSign);
    PairField::from_fn(grid, a, |x, y| {
        let (u, v) = ex.eval(x, y);
        (u, if flip { -v } else { v })
    })
}

fn outcome(name: &'static str, value: f64, bound: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: value <= bound,
        detail: format!("{value:.3e} <= {bound:.3e}"),
    }
}

/// Runs the fixture suite on the unit disc with spacing `h`.
pub fn run_validation(h: f64, fault: Option<Fault>) -> Result<Vec<CheckOutcome>, IoError> {
    let domain = crate::domain::make_domain(&crate::domain::DomainParams::unit_disc())
        .map_err(|e| IoError::Config(e.to_string()))?;
    let grid = build_grid(&domain, h).map_err(|e| IoError::Config(e.to_string()))?;
    let off_axis = |k: usize| grid.nodes()[k].y.abs() > 1.5 * h;
    let bound = 10.0 * h * h;
    let mut out = Vec::new();

    let lin = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&a| residual_pair(&fixture(&grid, LINEAR, a, fault)).sup_norm())
        .fold(0.0, f64::max);
    out.push(outcome("residual_pair:linear", lin, bound));
    let cat = residual_pair(&fixture(&grid, AnalyticExample::Catenoid, 0.0, fault)).sup_norm_where(off_axis);
    out.push(outcome("residual_pair:catenoid", cat, bound));
    let two = residual_pair(&fixture(&grid, AnalyticExample::Twosheet, 0.0, fault)).sup_norm_where(off_axis);
    out.push(outcome("residual_pair:twosheet", two, bound));

    let sl = |p: &PairField| -> Result<f64, IoError> {
        let e = sl_residual(&lift_mesh(p, 16)?);
        Ok(e.omega_max.max(e.im_omega_max))
    };
    out.push(outcome("sl_residual:linear", sl(&fixture(&grid, LINEAR, 1.0, fault))?, 5.0 * h));
    out.push(outcome(
        "sl_residual:catenoid",
        sl(&fixture(&grid, AnalyticExample::Catenoid, 0.0, fault))?,
        5.0 * h,
    ));
    let n = ((1.0 / h).ceil() as usize).max(8);
    let e = sl_residual(&hl_patch(0.5, (0.1, 1.0), [n, 2 * n, 2 * n])?);
    out.push(outcome("sl_residual:harvey-lawson", e.omega_max.max(e.im_omega_max), 5.0 * h));

    let b = Complex64::new(0.3, -0.4);
    let mut trip = Ok(());
    for a in [-1.0, -0.1, 0.0, 0.1, 1.0] {
        if let Err(e) = fibre_sample(a, b, 10) {
            trip = Err(e);
            break;
        }
    }
    out.push(CheckOutcome {
        name: "fibration:round-trip",
        passed: trip.is_ok(),
        detail: match trip {
            Ok(()) => format!("5000 samples within {ROUND_TRIP_TOL:.0e}"),
            Err(e) => e.to_string(),
        },
    });

    let seam = seam_continuity(&seam_gaps())?;
    out.push(CheckOutcome {
        name: "fibration:seam",
        passed: seam_ok(&seam),
        detail: format!("order {:.3} >= {SEAM_ORDER_MIN}", seam.order),
    });
    Ok(out)
}

/// Gaps `10⁻ᵏ`, `k = 2..6`.
pub fn seam_gaps() -> Vec<f64> {
    (2..=6).map(|k| 10f64.powi(-k)).collect()
}

pub fn seam_ok(seam: &SeamReport) -> bool {
    seam.order >= SEAM_ORDER_MIN && seam.discrepancies.windows(2).all(|w| w[1] < w[0])
}

/// Common header of every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub command: &'static str,
    pub config_hash: String,
    /// Files written next to the report, relative to the output directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
    pub result: T,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn report<T: Serialize>(
        mut self,
        name: &str,
        command: &'static str,
        cfg: &RunConfig,
        passed: bool,
        result: T,
    ) -> Result<Report<T>, IoError> {
        let path = self.path(name);
        let report = Report {
            command,
            config_hash: cfg.hash(),
            artifacts: std::mem::take(&mut self.written),
            passed,
            result,
        };
        write_json(&path, &report)?;
        Ok(report)
    }
}

fn setup(cfg: &RunConfig) -> Result<(Arc<Grid>, BoundaryFunction), IoError> {
    cfg.validate()?;
    let domain = cfg.domain_spec()?;
    let grid = build_grid(&domain, cfg.grid.h).map_err(|e| IoError::Config(e.to_string()))?;
    Ok((grid, cfg.boundary_function()?))
}

fn write_solution(out: &mut Outputs, prefix: &str, sol: &SolutionTriple) -> Result<(), IoError> {
    write_field_csv(&out.path(&format!("{prefix}f.csv")), &sol.f)?;
    write_field_csv(&out.path(&format!("{prefix}u.csv")), &sol.u)?;
    write_field_csv(&out.path(&format!("{prefix}v.csv")), &sol.v)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub a: f64,
    pub singular: bool,
    pub h: f64,
    pub nodes: usize,
    /// Continuation ladder of `a` values, when `a = 0` was requested.
    pub ladder: Option<Vec<f64>>,
    pub maximum_principle: MaxPrincipleReport,
    pub pair_residual: f64,
}

#[derive(Serialize)]
struct LogFile<'a> {
    a: f64,
    log: &'a ConvergenceLog,
}

fn solve_and_log(
    cfg: &RunConfig,
    grid: &Arc<Grid>,
    phi: &BoundaryFunction,
    out: &mut Outputs,
) -> Result<SolutionTriple, IoError> {
    match solve_at(grid, phi, cfg.solve.a, &cfg.solve.options) {
        Ok(sol) => {
            write_solution(out, "", &sol)?;
            write_json(
                &out.path("convergence.json"),
                &LogFile {
                    a: cfg.solve.a,
                    log: &sol.log,
                },
            )?;
            Ok(sol)
        }
        Err(e) => {
            #[derive(Serialize)]
            struct Failure {
                config_hash: String,
                error: String,
            }
            write_json(
                &out.dir.join("solve_error.json"),
                &Failure {
                    config_hash: cfg.hash(),
                    error: e.to_string(),
                },
            )?;
            Err(e.into())
        }
    }
}

/// Solves the configured problem and writes `f.csv`, `u.csv`, `v.csv`,
/// `convergence.json` and `solve_report.json`.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Report<SolveSummary>, IoError> {
    let (grid, phi) = setup(cfg)?;
    let mut out = Outputs::new(&cfg.output.dir);
    let sol = solve_and_log(cfg, &grid, &phi, &mut out)?;
    let maximum_principle = check_maximum_principle(&sol, 1e-8);
    let summary = SolveSummary {
        a: sol.a,
        singular: sol.singular,
        h: grid.h(),
        nodes: grid.node_count(),
        ladder: sol.singular.then(|| sol.log.steps.iter().map(|s| s.a).collect()),
        maximum_principle,
        pair_residual: residual_pair(&sol.pair()).sup_norm(),
    };
    out.report("solve_report.json", "solve", cfg, maximum_principle.holds, summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisSummary {
    pub a: f64,
    pub singularities: Option<Singularities>,
    /// Extrema of `φ − φ'` with `φ'(x, y) = −φ(x, −y)`.
    pub l: Option<usize>,
    pub bounds: Option<BoundsReport>,
    pub note: Option<String>,
}

/// Solves, locates singularities against the reflected solution and checks
/// the counting bounds. Writes the solution CSVs and `analysis_report.json`.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Report<AnalysisSummary>, IoError> {
    let (grid, phi) = setup(cfg)?;
    let mut out = Outputs::new(&cfg.output.dir);
    let sol = solve_and_log(cfg, &grid, &phi, &mut out)?;
    let a_floor = cfg.solve.options.a_floor;
    let mut summary = AnalysisSummary {
        a: sol.a,
        singularities: None,
        l: None,
        bounds: None,
        note: None,
    };
    let mut passed = true;
    if cfg.analysis.singularities {
        let sing = find_singularities(&sol.pair(), a_floor)?;
        if let Singularities::Isolated { records } = &sing {
            if cfg.analysis.bounds {
                let psi = phi.difference(&phi.reflected(), grid.domain(), cfg.analysis.extrema_samples);
                let l = count_boundary_extrema(&psi, grid.domain(), cfg.analysis.extrema_samples)?;
                let report = check_singularity_bounds(records, l);
                passed = report.passed;
                summary.l = Some(l);
                summary.bounds = Some(report);
            }
        } else {
            summary.note = Some("boundary data is odd in y; the x-axis is singular and carries no multiplicity".into());
        }
        summary.singularities = Some(sing);
    }
    out.report("analysis_report.json", "analyze", cfg, passed, summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberSummary {
    pub params: FamilyParams,
    pub singular: bool,
    pub files: Vec<String>,
    pub sl_residual: Option<CalibrationEval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub members: Vec<MemberSummary>,
    pub disjointness: DisjointnessReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FibreSummary {
    pub a: f64,
    pub b: [f64; 2],
    pub points: usize,
    pub contains_cone_point: bool,
    /// Largest `|F(p) − (a, b)|` over seeded random fibre points.
    pub random_round_trip: f64,
    pub sl_residual: CalibrationEval,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitSummary {
    pub fibres: Vec<FibreSummary>,
    pub seam: SeamReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum FibrationSummary {
    Family(FamilySummary),
    Explicit(ExplicitSummary),
}

/// Family mode: solves each `(a, b, c)` member, optionally lifts it, and
/// checks pairwise disjointness. Explicit mode: samples fibres of the
/// explicit map and checks continuity across its seam.
pub fn cmd_fibrate(cfg: &RunConfig) -> Result<Report<FibrationSummary>, IoError> {
    let fib = &cfg.fibration;
    if fib.a.is_empty() || fib.b.is_empty() || fib.c.is_empty() {
        return Err(IoError::Config("fibration parameter lists must be non-empty".into()));
    }
    match fib.mode {
        FibrationMode::Family => fibrate_family(cfg),
        FibrationMode::Explicit => fibrate_explicit(cfg),
    }
}

fn fibrate_family(cfg: &RunConfig) -> Result<Report<FibrationSummary>, IoError> {
    let (grid, phi) = setup(cfg)?;
    let fib = &cfg.fibration;
    let fam = build_fibration(&grid, &phi, &fib.a, &fib.b, &fib.c, &cfg.solve.options)?;
    let mut out = Outputs::new(&cfg.output.dir);
    let mut members = Vec::new();
    for (k, m) in fam.members.iter().enumerate() {
        let prefix = format!("member_{k}_");
        let before = out.written.len();
        write_solution(&mut out, &prefix, &m.solution)?;
        let mut sl = None;
        if fib.lift {
            let patch = lift_mesh(&m.solution.pair(), fib.theta_count)?;
            write_mesh_obj(&out.path(&format!("{prefix}mesh.obj")), &patch, cfg.output.obj_projection)?;
            write_mesh_csv(&out.path(&format!("{prefix}mesh.csv")), &patch)?;
            sl = Some(sl_residual(&patch));
        }
        members.push(MemberSummary {
            params: m.params,
            singular: m.solution.singular,
            files: out.written[before..].to_vec(),
            sl_residual: sl,
        });
    }
    let disjointness = check_disjointness(&fam, fib.sample_count);
    let passed = disjointness.passed;
    out.report(
        "fibration_report.json",
        "fibrate",
        cfg,
        passed,
        FibrationSummary::Family(FamilySummary { members, disjointness }),
    )
}

fn fibrate_explicit(cfg: &RunConfig) -> Result<Report<FibrationSummary>, IoError> {
    let fib = &cfg.fibration;
    if fib.fibre_n < 8 {
        return Err(IoError::Config("fibration.fibre_n must be at least 8".into()));
    }
    if cfg.output.obj_projection.iter().any(|&i| i > 5) {
        return Err(IoError::Config("obj_projection indices must be in 0..6".into()));
    }
    let mut out = Outputs::new(&cfg.output.dir);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fibres = Vec::new();
    let mut passed = true;
    let mut k = 0;
    for &a in &fib.a {
        for &br in &fib.b {
            for &bi in &fib.c {
                let b = Complex64::new(br, bi);
                let points = fibre_sample(a, b, fib.fibre_n)?;
                let apex = crate::clift::C3Point::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), b);
                let contains_cone_point = points.contains(&apex);
                let mut worst: f64 = 0.0;
                for _ in 0..fib.random_probes {
                    let r = rng.gen_range(0.0..=FIBRE_RADIUS);
                    let p = fibre_point(a, b, r, rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))?;
                    let (fa, fb) = fibration_map_explicit(&p);
                    worst = worst.max((fa - a).abs().max((fb - b).norm()));
                }
                let n = fib.fibre_n;
                let patch = fibre_patch(a, b, (0.0, FIBRE_RADIUS), [n, n, n])?;
                let before = out.written.len();
                write_mesh_obj(&out.path(&format!("fibre_{k}.obj")), &patch, cfg.output.obj_projection)?;
                write_mesh_csv(&out.path(&format!("fibre_{k}.csv")), &patch)?;
                passed &= worst <= ROUND_TRIP_TOL * (1.0 + b.norm());
                fibres.push(FibreSummary {
                    a,
                    b: [br, bi],
                    points: points.len(),
                    contains_cone_point,
                    random_round_trip: worst,
                    sl_residual: sl_residual(&patch),
                    files: out.written[before..].to_vec(),
                });
                k += 1;
            }
        }
    }
    let seam = seam_continuity(&seam_gaps())?;
    passed &= seam_ok(&seam);
    out.report(
        "fibration_report.json",
        "fibrate",
        cfg,
        passed,
        FibrationSummary::Explicit(ExplicitSummary { fibres, seam }),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportSummary {
    /// Whether `u.csv`/`v.csv` were read from the output directory rather
    /// than recomputed.
    pub from_artifacts: bool,
    pub a: f64,
    pub theta_count: usize,
    pub moment_defect: f64,
    pub sl_residual: CalibrationEval,
}

/// Lifts the solution to `C³` and writes `mesh.obj`, `mesh.csv` and
/// `export_report.json`. Reuses `u.csv` and `v.csv` from a previous solve
/// in the same output directory when they match the configured grid.
pub fn cmd_export(cfg: &RunConfig) -> Result<Report<ExportSummary>, IoError> {
    let (grid, phi) = setup(cfg)?;
    let mut out = Outputs::new(&cfg.output.dir);
    let (u_path, v_path) = (out.dir.join("u.csv"), out.dir.join("v.csv"));
    let stored = match (read_field_csv(&u_path, &grid), read_field_csv(&v_path, &grid)) {
        (Ok(u), Ok(v)) => Some(PairField::new(u, v, effective_a(cfg))),
        _ => None,
    };
    let from_artifacts = stored.is_some();
    let pair = match stored {
        Some(p) => p,
        None => solve_and_log(cfg, &grid, &phi, &mut out)?.pair(),
    };
    let patch = lift_mesh(&pair, cfg.output.theta_count)?;
    write_mesh_obj(&out.path("mesh.obj"), &patch, cfg.output.obj_projection)?;
    write_mesh_csv(&out.path("mesh.csv"), &patch)?;
    let summary = ExportSummary {
        from_artifacts,
        a: pair.a,
        theta_count: cfg.output.theta_count,
        moment_defect: patch.moment_defect(pair.a),
        sl_residual: sl_residual(&patch),
    };
    let passed = summary.moment_defect <= 1e-10;
    out.report("export_report.json", "export", cfg, passed, summary)
}

/// `a` of the stored solution: continuation results sit at `a_floor`.
fn effective_a(cfg: &RunConfig) -> f64 {
    if cfg.solve.a == 0.0 {
        cfg.solve.options.a_floor
    } else {
        cfg.solve.a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_suite_passes_and_detects_fault() {
        let good = run_validation(0.05, None).unwrap();
        assert_eq!(good.len(), VALIDATION_CHECKS.len());
        for (c, name) in good.iter().zip(VALIDATION_CHECKS) {
            assert_eq!(c.name, name);
            assert!(c.passed, "{} failed: {}", c.name, c.detail);
        }
        let bad = run_validation(0.05, Some(Fault::CatenoidVSign)).unwrap();
        let first = bad.iter().find(|c| !c.passed).unwrap();
        assert_eq!(first.name, "residual_pair:catenoid");
    }
}
