//! Dirichlet solver for the potential equation
//!
//! ```text
//! ((f_x)² + y² + a²)^{-1/2} f_xx + 2 f_yy = 0,   f|∂S = φ,
//! ```
//!
//! by damped Newton iteration at fixed `a ≠ 0`, and continuation `a → 0⁺`
//! for singular solutions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::BoundaryFunction;
use crate::calculus::{diff_x, diff_y, GridField, PairField, Stencils};
use crate::grid::Grid;
use crate::linalg::{BandMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Newton iteration diverged at a = {a}: residual {residual:.3e} after {iterations} iterations")]
    NewtonDiverged {
        a: f64,
        residual: f64,
        iterations: usize,
    },
    #[error("a = 0 cannot be solved directly; use continuation")]
    SingularParameter,
    #[error("continuation is not Cauchy in C1 at step {step}: increment {current:.3e} after {previous:.3e}")]
    NotCauchy {
        step: usize,
        previous: f64,
        current: f64,
    },
    #[error("invalid solve options: {0}")]
    InvalidOptions(String),
    #[error("initial guess lives on a different grid")]
    GridMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Tolerance on the `√W`-weighted residual, relative to `1 + ‖φ‖∞`.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Backtracking halvings allowed per Newton step.
    pub max_halvings: usize,
    /// First `a` of the continuation ladder.
    pub a_start: f64,
    /// Geometric ratio between successive `a`.
    pub continuation_factor: f64,
    pub a_floor: f64,
    /// C¹ increments below this are treated as converged.
    pub cauchy_tol: f64,
    /// Allowed growth of successive C¹ increments.
    pub cauchy_slack: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            newton_tol: 1e-10,
            max_newton_iters: 50,
            max_halvings: 20,
            a_start: 1.0,
            continuation_factor: 0.5,
            a_floor: 1e-4,
            cauchy_tol: 1e-5,
            cauchy_slack: 1.5,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("a_start", self.a_start),
            ("continuation_factor", self.continuation_factor),
            ("a_floor", self.a_floor),
            ("cauchy_tol", self.cauchy_tol),
            ("cauchy_slack", self.cauchy_slack),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SolveError::InvalidOptions(format!("{name} must be positive")));
            }
        }
        if self.continuation_factor >= 1.0 {
            return Err(SolveError::InvalidOptions(
                "continuation_factor must be below 1".into(),
            ));
        }
        if self.a_floor >= self.a_start * self.continuation_factor {
            return Err(SolveError::InvalidOptions(
                "a_floor must lie below the first continuation step".into(),
            ));
        }
        if self.max_newton_iters == 0 {
            return Err(SolveError::InvalidOptions("max_newton_iters must be positive".into()));
        }
        Ok(())
    }

    /// `a_start, a_start·r, a_start·r², …` down to and ending at `a_floor`.
    pub fn schedule(&self) -> Vec<f64> {
        let mut out = vec![self.a_start];
        let mut a = self.a_start;
        loop {
            a *= self.continuation_factor;
            if a <= self.a_floor {
                break;
            }
            out.push(a);
        }
        out.push(self.a_floor);
        out
    }
}

/// Per-`a` Newton record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLog {
    pub a: f64,
    /// Weighted residual sup-norm before each iteration and at exit.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// `‖f_a − f_prev‖∞ + ‖∇f_a − ∇f_prev‖∞`; absent for the first step.
    pub increment: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceLog {
    pub steps: Vec<StepLog>,
}

impl ConvergenceLog {
    pub fn increments(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.increment).collect()
    }
}

/// Potential `f` with `u = ∂f/∂y`, `v = ∂f/∂x`.
#[derive(Debug, Clone)]
pub struct SolutionTriple {
    pub f: GridField,
    pub u: GridField,
    pub v: GridField,
    pub a: f64,
    pub phi: BoundaryFunction,
    pub log: ConvergenceLog,
    /// Set on continuation results standing in for `a = 0`.
    pub singular: bool,
}

impl SolutionTriple {
    pub fn grid(&self) -> &Arc<Grid> {
        self.f.grid()
    }

    pub fn pair(&self) -> PairField {
        PairField::new(self.u.clone(), self.v.clone(), self.a)
    }

    fn from_potential(f: GridField, a: f64, phi: BoundaryFunction, log: ConvergenceLog) -> Self {
        let u = diff_y(&f);
        let v = diff_x(&f);
        SolutionTriple {
            f,
            u,
            v,
            a,
            phi,
            log,
            singular: false,
        }
    }
}

/// `φ` evaluated at every boundary hit of the grid.
pub fn boundary_values(grid: &Grid, phi: &BoundaryFunction) -> Vec<f64> {
    grid.hits()
        .iter()
        .map(|b| phi.eval_at(b.theta, b.x, b.y))
        .collect()
}

/// `‖f₁ − f₂‖∞ + max |∇f₁ − ∇f₂|` over interior nodes.
pub fn c1_distance(s1: &SolutionTriple, s2: &SolutionTriple) -> f64 {
    let n = s1.grid().node_count();
    let df = s1.f.sub(&s2.f).sup_norm();
    let dg = (0..n)
        .map(|k| {
            let du = s1.u.values()[k] - s2.u.values()[k];
            let dv = s1.v.values()[k] - s2.v.values()[k];
            du.hypot(dv)
        })
        .fold(0.0, f64::max);
    df + dg
}

struct Problem<'a> {
    grid: &'a Grid,
    st: Stencils,
    a2: f64,
}

impl<'a> Problem<'a> {
    fn new(grid: &'a Grid, a: f64) -> Self {
        Problem {
            grid,
            st: Stencils::new(grid),
            a2: a * a,
        }
    }

    /// Residual `F` and its `√W`-weighted sup-norm.
    fn residual(&self, vals: &[f64]) -> (Vec<f64>, f64) {
        let mut weighted: f64 = 0.0;
        let r = self
            .grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, node)| {
                let fx = self.st.x[k].first(vals, k);
                let fxx = self.st.x[k].second(vals, k);
                let fyy = self.st.y[k].second(vals, k);
                let sw = (fx * fx + node.y * node.y + self.a2).sqrt();
                let r = fxx / sw + 2.0 * fyy;
                weighted = weighted.max((r * sw).abs());
                r
            })
            .collect();
        (r, weighted)
    }

    /// `L(δ) = W^{-1/2} δ_xx − f_xx W^{-3/2} f_x δ_x + 2 δ_yy`.
    fn jacobian(&self, vals: &[f64]) -> BandMatrix {
        let n = self.grid.node_count();
        let bw = self.grid.bandwidth().max(1);
        let mut m = BandMatrix::zeros(n, bw, bw);
        for (k, node) in self.grid.nodes().iter().enumerate() {
            let sx = &self.st.x[k];
            let sy = &self.st.y[k];
            let fx = sx.first(vals, k);
            let fxx = sx.second(vals, k);
            let w = fx * fx + node.y * node.y + self.a2;
            let inv_sw = 1.0 / w.sqrt();
            let conv = -fxx * inv_sw / w * fx;
            let xs = [sx.minus, k, sx.plus];
            for i in 0..3 {
                if xs[i] < n {
                    m.add(k, xs[i], sx.d2[i] * inv_sw + conv * sx.d1[i])
                        .expect("stencil within band");
                }
            }
            let ys = [sy.minus, k, sy.plus];
            for i in 0..3 {
                if ys[i] < n {
                    m.add(k, ys[i], 2.0 * sy.d2[i]).expect("stencil within band");
                }
            }
        }
        m
    }

    /// Linear solve of `c·f_xx + 2 f_yy = 0` with the boundary data in `vals`.
    fn frozen_extension(&self, vals: &mut [f64], c: f64) -> Result<(), SolveError> {
        let n = self.grid.node_count();
        let bw = self.grid.bandwidth().max(1);
        let mut m = BandMatrix::zeros(n, bw, bw);
        let mut rhs = vec![0.0; n];
        for k in 0..n {
            for (st, scale) in [(&self.st.x[k], c), (&self.st.y[k], 2.0)] {
                let slots = [st.minus, k, st.plus];
                for i in 0..3 {
                    let w = scale * st.d2[i];
                    if slots[i] < n {
                        m.add(k, slots[i], w).expect("stencil within band");
                    } else {
                        rhs[k] -= w * vals[slots[i]];
                    }
                }
            }
        }
        let sol = m.factor()?.solve(&rhs);
        vals[..n].copy_from_slice(&sol);
        Ok(())
    }
}

fn newton(
    problem: &Problem,
    vals: &mut [f64],
    opts: &SolveOptions,
    tol: f64,
    a: f64,
) -> Result<StepLog, SolveError> {
    let n = problem.grid.node_count();
    let (mut r, mut norm) = problem.residual(vals);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > tol {
        if iterations == opts.max_newton_iters {
            return Err(SolveError::NewtonDiverged {
                a,
                residual: norm,
                iterations,
            });
        }
        let lu = problem.jacobian(vals).factor()?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = lu.solve(&rhs);
        let mut t = 1.0;
        let mut accepted = None;
        let mut trial = vals.to_vec();
        for _ in 0..=opts.max_halvings {
            for k in 0..n {
                trial[k] = vals[k] + t * delta[k];
            }
            let (tr, tn) = problem.residual(&trial);
            if tn < norm && tn.is_finite() {
                accepted = Some((tr, tn));
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((tr, tn)) => {
                vals[..n].copy_from_slice(&trial[..n]);
                r = tr;
                norm = tn;
                history.push(norm);
            }
            None => {
                return Err(SolveError::NewtonDiverged {
                    a,
                    residual: norm,
                    iterations,
                })
            }
        }
    }
    Ok(StepLog {
        a,
        residuals: history,
        iterations,
        increment: None,
    })
}

fn phi_scale(boundary: &[f64]) -> f64 {
    1.0 + boundary.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// Newton solve at fixed `a ≠ 0`.
///
/// Without an initial guess, starts from the frozen-coefficient extension
/// `(1 + a²)^{-1/2} f_xx + 2 f_yy = 0`, falling back to the zero interior.
pub fn solve_dirichlet_fixed_a(
    grid: &Arc<Grid>,
    phi: &BoundaryFunction,
    a: f64,
    opts: &SolveOptions,
    initial_guess: Option<&GridField>,
) -> Result<SolutionTriple, SolveError> {
    if a == 0.0 {
        return Err(SolveError::SingularParameter);
    }
    if !(opts.newton_tol > 0.0) || opts.max_newton_iters == 0 {
        return Err(SolveError::InvalidOptions("newton settings must be positive".into()));
    }
    let n = grid.node_count();
    let bvals = boundary_values(grid, phi);
    let tol = opts.newton_tol * phi_scale(&bvals);
    let problem = Problem::new(grid, a);

    let mut vals = vec![0.0; grid.value_count()];
    vals[n..].copy_from_slice(&bvals);
    let step = match initial_guess {
        Some(guess) => {
            if !Arc::ptr_eq(guess.grid(), grid) {
                return Err(SolveError::GridMismatch);
            }
            vals[..n].copy_from_slice(guess.node_values());
            newton(&problem, &mut vals, opts, tol, a)?
        }
        None => {
            problem.frozen_extension(&mut vals, 1.0 / (1.0 + a * a).sqrt())?;
            match newton(&problem, &mut vals, opts, tol, a) {
                Ok(s) => s,
                Err(SolveError::NewtonDiverged { .. }) => {
                    vals[..n].iter_mut().for_each(|v| *v = 0.0);
                    newton(&problem, &mut vals, opts, tol, a)?
                }
                Err(e) => return Err(e),
            }
        }
    };
    let f = GridField::new(grid.clone(), vals);
    Ok(SolutionTriple::from_potential(
        f,
        a,
        phi.clone(),
        ConvergenceLog { steps: vec![step] },
    ))
}

/// Continuation along `opts.schedule()`, each step warm-started from the
/// previous one. Returns the `a_floor` solution flagged singular.
pub fn solve_continuation(
    grid: &Arc<Grid>,
    phi: &BoundaryFunction,
    opts: &SolveOptions,
) -> Result<SolutionTriple, SolveError> {
    opts.validate()?;
    let mut log = ConvergenceLog::default();
    let mut prev: Option<SolutionTriple> = None;
    let mut prev_inc: Option<f64> = None;
    for (step, a) in opts.schedule().into_iter().enumerate() {
        let mut sol = solve_dirichlet_fixed_a(grid, phi, a, opts, prev.as_ref().map(|s| &s.f))?;
        let mut entry = sol.log.steps.pop().expect("one step per fixed-a solve");
        if let Some(p) = &prev {
            let inc = c1_distance(&sol, p);
            entry.increment = Some(inc);
            if let Some(last) = prev_inc {
                if inc > opts.cauchy_slack * last && inc > opts.cauchy_tol {
                    return Err(SolveError::NotCauchy {
                        step,
                        previous: last,
                        current: inc,
                    });
                }
            }
            prev_inc = Some(inc);
        }
        log.steps.push(entry);
        prev = Some(sol);
    }
    let mut out = prev.expect("schedule is never empty");
    out.log = log;
    out.singular = true;
    Ok(out)
}

/// Solves at `a`, routing `a = 0` through continuation.
pub fn solve_at(
    grid: &Arc<Grid>,
    phi: &BoundaryFunction,
    a: f64,
    opts: &SolveOptions,
) -> Result<SolutionTriple, SolveError> {
    if a == 0.0 {
        solve_continuation(grid, phi, opts)
    } else {
        solve_dirichlet_fixed_a(grid, phi, a, opts, None)
    }
}

/// Member parameters `(a, b, c)` of a boundary family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Independent solves of `family(α)` for every `α`, in input order. Member
/// failures are returned in place without aborting the batch.
pub fn solve_family<F>(
    grid: &Arc<Grid>,
    family: F,
    params: &[FamilyParams],
    opts: &SolveOptions,
) -> Vec<Result<SolutionTriple, SolveError>>
where
    F: Fn(&FamilyParams) -> BoundaryFunction + Sync,
{
    params
        .par_iter()
        .map(|p| solve_at(grid, &family(p), p.a, opts))
        .collect()
}

/// Extremes of `φ` (on the hits and 1024 boundary samples) and of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub phi_min: f64,
    pub phi_max: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub holds: bool,
}

pub fn check_maximum_principle(sol: &SolutionTriple, tol: f64) -> MaxPrincipleReport {
    let grid = sol.grid();
    let mut phi_min = f64::INFINITY;
    let mut phi_max = f64::NEG_INFINITY;
    for &v in sol.f.boundary_values() {
        phi_min = phi_min.min(v);
        phi_max = phi_max.max(v);
    }
    for (_, v) in sol.phi.sample(grid.domain(), 1024) {
        phi_min = phi_min.min(v);
        phi_max = phi_max.max(v);
    }
    let nodes = sol.f.node_values();
    let f_min = nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let f_max = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    MaxPrincipleReport {
        phi_min,
        phi_max,
        f_min,
        f_max,
        holds: f_min >= phi_min - tol && f_max <= phi_max + tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::residual_potential;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;

    fn disc(h: f64) -> Arc<Grid> {
        build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), h).unwrap()
    }

    #[test]
    fn schedule_halves_down_to_floor() {
        let s = SolveOptions::default().schedule();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.5);
        assert_eq!(*s.last().unwrap(), 1e-4);
        assert_eq!(s.len(), 15);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn options_validation() {
        let bad = SolveOptions {
            a_floor: 0.9,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(SolveOptions::default().validate().is_ok());
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let g = disc(0.1);
        let s = solve_dirichlet_fixed_a(&g, &BoundaryFunction::zero(), 1.0, &Default::default(), None)
            .unwrap();
        assert_eq!(s.f.sup_norm(), 0.0);
    }

    #[test]
    fn a_zero_is_refused() {
        let g = disc(0.1);
        assert_eq!(
            solve_dirichlet_fixed_a(&g, &BoundaryFunction::zero(), 0.0, &Default::default(), None)
                .unwrap_err(),
            SolveError::SingularParameter
        );
    }

    #[test]
    fn bilinear_data_is_reproduced() {
        let g = disc(0.1);
        let (al, be, ga) = (0.3, -0.2, 0.7);
        let phi = BoundaryFunction::bilinear(al, be, ga);
        for a in [1.0, 0.3, -0.6] {
            let s = solve_dirichlet_fixed_a(&g, &phi, a, &Default::default(), None).unwrap();
            for (k, n) in g.nodes().iter().enumerate() {
                assert!((s.f.values()[k] - (ga * n.x + be * n.y + al * n.x * n.y)).abs() < 1e-10);
                assert!((s.u.values()[k] - (be + al * n.x)).abs() < 1e-8);
                assert!((s.v.values()[k] - (ga + al * n.y)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn converged_solution_meets_residual_and_maximum_principle() {
        let g = disc(0.1);
        let phi = BoundaryFunction::trig(vec![0.0, 0.3, 1.0], vec![0.0, 0.0, 0.4]);
        let opts = SolveOptions::default();
        let s = solve_dirichlet_fixed_a(&g, &phi, 1.0, &opts, None).unwrap();
        let scale = phi_scale(s.f.boundary_values());
        assert!(residual_potential(&s.f, 1.0).sup_norm() <= opts.newton_tol * scale);
        assert!(check_maximum_principle(&s, 1e-8).holds);
        let hits_match = s
            .f
            .boundary_values()
            .iter()
            .zip(boundary_values(&g, &phi))
            .all(|(a, b)| (a - b).abs() < 1e-12);
        assert!(hits_match);
    }

    #[test]
    fn family_preserves_order_and_reports_failures_in_place() {
        let g = disc(0.1);
        let params = [
            FamilyParams { a: 1.0, b: 0.0, c: 0.0 },
            FamilyParams { a: 1.0, b: 0.5, c: 0.0 },
        ];
        let out = solve_family(&g, |p| BoundaryFunction::zero().with_affine(p.b, p.c), &params, &Default::default());
        assert_eq!(out.len(), 2);
        assert!(out[0].as_ref().unwrap().f.sup_norm() < 1e-14);
        assert!((out[1].as_ref().unwrap().v.sup_norm() - 0.5).abs() < 1e-10);

        let bad_opts = SolveOptions {
            max_newton_iters: 1,
            ..Default::default()
        };
        let phi = BoundaryFunction::trig(vec![0.0, 0.0, 2.0], vec![]);
        let out = solve_family(&g, |_| phi.clone(), &[FamilyParams { a: 0.0, b: 0.0, c: 0.0 }], &bad_opts);
        assert!(out[0].is_err());
    }
}
