//! Line integration of gradient fields: potential `f` from `(v, u)` and
//! `u` from `v`.

use super::diff::{diff_x, diff_y, Axis};
use super::fields::{GridField, PairField};
use super::CalculusError;
use crate::grid::{Arm, Dir, Grid};

/// Integrated field together with its path-independence defect.
#[derive(Debug, Clone)]
pub struct Recovered {
    pub field: GridField,
    /// Max node-wise gap between row-first and column-first staircases.
    pub path_error: f64,
    pub tolerance: f64,
}

/// Tolerance on the staircase discrepancy: `10·h²·diam(S)`.
pub fn path_tolerance(grid: &Grid) -> f64 {
    10.0 * grid.h() * grid.h() * grid.domain().diameter()
}

/// Potential with `f_x = v`, `f_y = u` and `f(anchor) = 0`.
pub fn recover_f(p: &PairField, anchor: usize) -> Result<Recovered, CalculusError> {
    integrate_gradient(&p.v, &p.u, anchor)
}

/// `u` with `u_x = v_y`, `u_y = −v_x / (2(v² + y² + a²)^{1/2})`, `u(anchor) = 0`.
pub fn recover_u_from_v(v: &GridField, a: f64, anchor: usize) -> Result<Recovered, CalculusError> {
    if a == 0.0 {
        return Err(CalculusError::SingularParameter);
    }
    let grid = v.grid();
    let vx = diff_x(v);
    let vy = diff_y(v);
    let gy: Vec<f64> = (0..grid.value_count())
        .map(|s| {
            let (_, y) = grid.slot_position(s);
            let vv = v.values()[s];
            -vx.values()[s] / (2.0 * (vv * vv + y * y + a * a).sqrt())
        })
        .collect();
    integrate_gradient(&vy, &GridField::new(grid.clone(), gy), anchor)
}

/// Integrates `(gx, gy)` along axis-parallel staircases from `anchor`.
pub fn integrate_gradient(
    gx: &GridField,
    gy: &GridField,
    anchor: usize,
) -> Result<Recovered, CalculusError> {
    if !gx.same_grid(gy) {
        return Err(CalculusError::GridMismatch);
    }
    let grid = gx.grid();
    if anchor >= grid.node_count() {
        return Err(CalculusError::BadAnchor(anchor));
    }
    let row_first = staircase(grid, gx.values(), gy.values(), anchor, Axis::X);
    let col_first = staircase(grid, gx.values(), gy.values(), anchor, Axis::Y);
    let path_error = row_first
        .iter()
        .zip(&col_first)
        .take(grid.node_count())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let tolerance = path_tolerance(grid);
    if !(path_error <= tolerance) {
        return Err(CalculusError::NotIntegrable {
            error: path_error,
            tolerance,
        });
    }
    Ok(Recovered {
        field: GridField::new(grid.clone(), row_first),
        path_error,
        tolerance,
    })
}

fn staircase(grid: &Grid, gx: &[f64], gy: &[f64], anchor: usize, first: Axis) -> Vec<f64> {
    let n = grid.node_count();
    let h = grid.h();
    let mut val = vec![0.0; grid.value_count()];
    let mut done = vec![false; n];
    done[anchor] = true;
    let mut axis = first;
    let mut idle_phases = 0;
    while idle_phases < 2 {
        let seeds: Vec<usize> = (0..n).filter(|&k| done[k]).collect();
        let (g, dirs) = match axis {
            Axis::X => (gx, [Dir::East, Dir::West]),
            Axis::Y => (gy, [Dir::North, Dir::South]),
        };
        let mut progressed = false;
        for &seed in &seeds {
            for dir in dirs {
                let sign = if matches!(dir, Dir::East | Dir::North) { 1.0 } else { -1.0 };
                let mut k = seed;
                while let Arm::Node(m) = grid.arm(k, dir) {
                    if done[m] {
                        break;
                    }
                    val[m] = val[k] + sign * 0.5 * h * (g[k] + g[m]);
                    done[m] = true;
                    progressed = true;
                    k = m;
                }
            }
        }
        idle_phases = if progressed { 0 } else { idle_phases + 1 };
        axis = match axis {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        };
    }
    for (b, hit) in grid.hits().iter().enumerate() {
        let k = hit.node;
        let (g, sign) = match hit.dir {
            Dir::East => (gx, 1.0),
            Dir::West => (gx, -1.0),
            Dir::North => (gy, 1.0),
            Dir::South => (gy, -1.0),
        };
        val[n + b] = val[k] + sign * 0.5 * hit.frac * h * (g[k] + g[n + b]);
    }
    val
}
