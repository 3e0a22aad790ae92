//! Families of solutions `α = (a, b, c) ↦ (u_α, v_α)` for boundary data
//! `Φ(a, b, c) = φ + bx + cy`, and checks that their lifts are disjoint.

use std::sync::Arc;

use serde::Serialize;

use super::lift::{lift_point, C3Point};
use super::CliftError;
use crate::analysis::{count_boundary_extrema, AnalysisError};
use crate::boundary::BoundaryFunction;
use crate::grid::Grid;
use crate::solver::{solve_family, FamilyParams, SolutionTriple, SolveOptions};

/// Boundary samples used to count extrema of member differences.
pub const EXTREMUM_SAMPLES: usize = 1024;
/// Same-level members must differ by more than this at every node.
pub const DISJOINT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct FibrationMember {
    pub params: FamilyParams,
    pub solution: SolutionTriple,
}

#[derive(Debug, Clone)]
pub struct FibrationFamily {
    pub phi: BoundaryFunction,
    pub members: Vec<FibrationMember>,
}

impl FibrationFamily {
    /// `Φ(a, b, c) = φ + bx + cy`; `a` does not enter the boundary data.
    pub fn boundary_data(&self, params: &FamilyParams) -> BoundaryFunction {
        self.phi.with_affine(params.b, params.c)
    }

    pub fn params(&self) -> Vec<FamilyParams> {
        self.members.iter().map(|m| m.params).collect()
    }
}

/// Number of boundary extrema of `Φ(α) − Φ(α')`.
fn difference_extrema(grid: &Grid, p: &FamilyParams, q: &FamilyParams) -> Result<usize, AnalysisError> {
    let psi = BoundaryFunction::zero().with_affine(p.b - q.b, p.c - q.c);
    count_boundary_extrema(&psi, grid.domain(), EXTREMUM_SAMPLES)
}

/// Solves every member of the product `a_values × b_values × c_values`
/// after checking that each same-`a` pair of boundary data differs by a
/// function with exactly one maximum and one minimum.
pub fn build_fibration(
    grid: &Arc<Grid>,
    phi: &BoundaryFunction,
    a_values: &[f64],
    b_values: &[f64],
    c_values: &[f64],
    opts: &SolveOptions,
) -> Result<FibrationFamily, CliftError> {
    if a_values.is_empty() || b_values.is_empty() || c_values.is_empty() {
        return Err(CliftError::InvalidParameter("empty parameter list".into()));
    }
    let mut params = Vec::new();
    for &a in a_values {
        for &b in b_values {
            for &c in c_values {
                let p = FamilyParams { a, b, c };
                if ![a, b, c].iter().all(|v| v.is_finite()) {
                    return Err(CliftError::InvalidParameter(format!("non-finite member {p:?}")));
                }
                if params.contains(&p) {
                    return Err(CliftError::InvalidParameter(format!("duplicate member {p:?}")));
                }
                params.push(p);
            }
        }
    }
    for (i, p) in params.iter().enumerate() {
        for q in &params[i + 1..] {
            if p.a != q.a {
                continue;
            }
            let l = difference_extrema(grid, p, q).ok();
            if l != Some(1) {
                return Err(CliftError::ExtremumConditionFailed {
                    first: *p,
                    second: *q,
                    extrema: l,
                });
            }
        }
    }
    let results = solve_family(grid, |p| phi.with_affine(p.b, p.c), &params, opts);
    let mut members = Vec::with_capacity(params.len());
    let mut failures = Vec::new();
    for (p, r) in params.iter().zip(results) {
        match r {
            Ok(solution) => members.push(FibrationMember { params: *p, solution }),
            Err(e) => failures.push((*p, e)),
        }
    }
    if !failures.is_empty() {
        return Err(CliftError::MemberSolve(failures));
    }
    Ok(FibrationFamily {
        phi: phi.clone(),
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Separation {
    /// Different `a`: moment-map levels of sampled lift points.
    MomentMap { expected: f64, observed: f64 },
    /// Equal `a`: smallest node-wise `|(u, v) − (u', v')|`.
    SameLevel { min_difference: f64, floor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub first: usize,
    pub second: usize,
    pub separation: Separation,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointnessReport {
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

/// Lifts of `sample_count` evenly strided interior nodes at four orbit angles.
fn sample_lifts(sol: &SolutionTriple, sample_count: usize) -> Vec<C3Point> {
    let nodes = sol.grid().nodes();
    let stride = (nodes.len() / sample_count.max(1)).max(1);
    let mut out = Vec::new();
    for (k, node) in nodes.iter().enumerate().step_by(stride) {
        for q in 0..4 {
            let theta = std::f64::consts::FRAC_PI_2 * q as f64;
            out.push(lift_point(node.x, node.y, sol.u.values()[k], sol.v.values()[k], sol.a, theta));
        }
    }
    out
}

/// Pairwise separation of family members. Different levels are compared
/// through the moment map `|z₁|² − |z₂|² = 2a` of actual lift samples; the
/// observed gap must equal `|2a − 2a'|` to `1e-10`. Equal levels must keep
/// `(u, v)` apart by more than [`DISJOINT_FLOOR`] at every node.
pub fn check_disjointness(fam: &FibrationFamily, sample_count: usize) -> DisjointnessReport {
    let lifts: Vec<Vec<C3Point>> = fam
        .members
        .iter()
        .map(|m| sample_lifts(&m.solution, sample_count))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..fam.members.len() {
        for j in i + 1..fam.members.len() {
            let (s1, s2) = (&fam.members[i].solution, &fam.members[j].solution);
            let check = if s1.a != s2.a {
                let expected = (2.0 * s1.a - 2.0 * s2.a).abs();
                let mut observed = f64::INFINITY;
                let mut worst_dev: f64 = 0.0;
                for p in &lifts[i] {
                    for q in &lifts[j] {
                        let gap = (p.moment() - q.moment()).abs();
                        observed = observed.min(gap);
                        worst_dev = worst_dev.max((gap - expected).abs());
                    }
                }
                PairCheck {
                    first: i,
                    second: j,
                    separation: Separation::MomentMap { expected, observed },
                    passed: worst_dev <= 1e-10 * (1.0 + expected),
                }
            } else {
                let n = s1.grid().node_count();
                let min_difference = (0..n)
                    .map(|k| {
                        let du = s1.u.values()[k] - s2.u.values()[k];
                        let dv = s1.v.values()[k] - s2.v.values()[k];
                        du.hypot(dv)
                    })
                    .fold(f64::INFINITY, f64::min);
                PairCheck {
                    first: i,
                    second: j,
                    separation: Separation::SameLevel {
                        min_difference,
                        floor: DISJOINT_FLOOR,
                    },
                    passed: min_difference > DISJOINT_FLOOR,
                }
            };
            pairs.push(check);
        }
    }
    let passed = pairs.iter().all(|p| p.passed);
    DisjointnessReport { pairs, passed }
}
