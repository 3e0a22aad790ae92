//! Weak form of the divergence-form equation for `v`.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::diff::{diff_x, diff_y};
use super::fields::GridField;
use super::CalculusError;
use crate::grid::Grid;

/// Boundary values of a test function must be below this.
pub const TEST_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidual {
    /// `−∫ ψ_x K v_x − 2∫ ψ_y v_y` per test function.
    pub values: Vec<f64>,
    /// `∫ |ψ_x K v_x| + 2|ψ_y v_y|`, the size of the terms being balanced.
    pub scales: Vec<f64>,
}

impl WeakResidual {
    pub fn max_relative(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.scales)
            .map(|(v, s)| if *s > 0.0 { v.abs() / s } else { v.abs() })
            .fold(0.0, f64::max)
    }
}

/// Weak residual of `∂_x[K v_x] + 2 v_yy`, `K = (v² + y² + a²)^{-1/2}`,
/// against each test function, using first derivatives of `v` only and
/// cut-cell area weights.
pub fn weak_residual_v(
    v: &GridField,
    a: f64,
    tests: &[GridField],
) -> Result<WeakResidual, CalculusError> {
    let grid = v.grid();
    let weights = grid.node_weights();
    let vx = diff_x(v);
    let vy = diff_y(v);
    let mut values = Vec::with_capacity(tests.len());
    let mut scales = Vec::with_capacity(tests.len());
    for (idx, psi) in tests.iter().enumerate() {
        if !psi.same_grid(v) {
            return Err(CalculusError::GridMismatch);
        }
        if psi.boundary_values().iter().any(|b| b.abs() >= TEST_BOUNDARY_TOL) {
            return Err(CalculusError::TestNotVanishing(idx));
        }
        if psi.node_values().iter().all(|&p| p == 0.0) {
            values.push(0.0);
            scales.push(0.0);
            continue;
        }
        let px = diff_x(psi);
        let py = diff_y(psi);
        let mut acc = 0.0;
        let mut scale = 0.0;
        for (k, node) in grid.nodes().iter().enumerate() {
            let vv = v.values()[k];
            let kk = (vv * vv + node.y * node.y + a * a).powf(-0.5);
            let t1 = px.values()[k] * kk * vx.values()[k];
            let t2 = 2.0 * py.values()[k] * vy.values()[k];
            acc -= weights[k] * (t1 + t2);
            scale += weights[k] * (t1.abs() + t2.abs());
        }
        values.push(acc);
        scales.push(scale);
    }
    Ok(WeakResidual { values, scales })
}

/// Random smooth bumps `(1 − r²/ρ²)³₊` with supports strictly inside the
/// domain, seeded for reproducibility.
pub fn bump_test_functions(grid: &Arc<Grid>, count: usize, seed: u64) -> Vec<GridField> {
    let domain = grid.domain();
    let boundary: Vec<(f64, f64)> = (0..512)
        .map(|k| domain.boundary_point(TAU * k as f64 / 512.0))
        .collect();
    let dist_to_boundary = |x: f64, y: f64| {
        boundary
            .iter()
            .map(|(bx, by)| (bx - x).hypot(by - y))
            .fold(f64::INFINITY, f64::min)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * domain.diameter();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let cx = rng.gen_range(-half..half);
        let cy = rng.gen_range(-half..half);
        if !domain.contains(cx, cy) {
            continue;
        }
        let room = dist_to_boundary(cx, cy) - 2.0 * grid.h();
        if room < 4.0 * grid.h() {
            continue;
        }
        let rho = rng.gen_range(0.5..1.0) * room;
        let amp = rng.gen_range(0.5..1.5);
        out.push(GridField::from_fn(grid, |x, y| {
            let r2 = ((x - cx).powi(2) + (y - cy).powi(2)) / (rho * rho);
            if r2 < 1.0 {
                amp * (1.0 - r2).powi(3)
            } else {
                0.0
            }
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;

    #[test]
    fn zero_test_function_gives_exact_zero() {
        let g = build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), 0.05).unwrap();
        let v = GridField::from_fn(&g, |x, y| x * y + 1.0);
        let r = weak_residual_v(&v, 1.0, &[GridField::zeros(&g)]).unwrap();
        assert_eq!(r.values, vec![0.0]);
    }

    #[test]
    fn nonvanishing_test_function_is_rejected() {
        let g = build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), 0.05).unwrap();
        let v = GridField::zeros(&g);
        let bad = GridField::from_fn(&g, |_, _| 1.0);
        assert_eq!(
            weak_residual_v(&v, 1.0, &[bad]).unwrap_err(),
            CalculusError::TestNotVanishing(0)
        );
    }

    #[test]
    fn bumps_vanish_on_boundary() {
        let g = build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), 0.05).unwrap();
        let tests = bump_test_functions(&g, 20, 0);
        assert_eq!(tests.len(), 20);
        for t in &tests {
            assert!(t.boundary_values().iter().all(|b| *b == 0.0));
            assert!(t.sup_norm() > 0.0);
        }
    }
}
