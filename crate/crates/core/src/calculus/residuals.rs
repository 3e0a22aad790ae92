//! Residual operators of the first-order system, the potential equation and
//! the divergence-form equation for `v`.

use super::diff::{diff_x, diff_y, extrapolate_to_boundary, Stencils};
use super::fields::{GridField, PairField};

/// Default continuation floor for `a`.
pub const DEFAULT_A_FLOOR: f64 = 1e-4;

/// Threshold below which `|v(x, 0)|` counts as zero on a grid of spacing `h`.
pub fn singular_threshold(h: f64, a_floor: f64) -> f64 {
    (10.0 * a_floor).max(5.0 * h * h)
}

/// Residuals `R₁ = u_x − v_y`, `R₂ = v_x + 2(v² + y² + a²)^{1/2} u_y`.
#[derive(Debug, Clone)]
pub struct PairResidual {
    pub r1: GridField,
    pub r2: GridField,
    /// Nodes on `y = 0` with `|v| < ε_sing` when `a` is at or below the floor.
    pub singular_nodes: Vec<usize>,
}

impl PairResidual {
    /// Sup-norm of both residuals over nodes that are not flagged singular.
    pub fn sup_norm(&self) -> f64 {
        let flagged = |k: usize| self.singular_nodes.binary_search(&k).is_ok();
        self.r1
            .sup_norm_where(|k| !flagged(k))
            .max(self.r2.sup_norm_where(|k| !flagged(k)))
    }

    /// Sup-norm restricted to nodes accepted by `keep` (and not flagged).
    pub fn sup_norm_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let flagged = |k: usize| self.singular_nodes.binary_search(&k).is_ok();
        let keep = |k: usize| keep(k) && !flagged(k);
        self.r1.sup_norm_where(keep).max(self.r2.sup_norm_where(keep))
    }
}

pub fn residual_pair(p: &PairField) -> PairResidual {
    residual_pair_with(p, DEFAULT_A_FLOOR)
}

pub fn residual_pair_with(p: &PairField, a_floor: f64) -> PairResidual {
    let grid = p.grid();
    let ux = diff_x(&p.u);
    let uy = diff_y(&p.u);
    let vx = diff_x(&p.v);
    let vy = diff_y(&p.v);
    let a2 = p.a * p.a;
    let r1 = ux.sub(&vy);
    let mut r2v: Vec<f64> = (0..grid.value_count())
        .map(|s| {
            let (_, y) = grid.slot_position(s);
            let v = p.v.values()[s];
            vx.values()[s] + 2.0 * (v * v + y * y + a2).sqrt() * uy.values()[s]
        })
        .collect();
    extrapolate_to_boundary(grid, &mut r2v);
    let r2 = GridField::new(grid.clone(), r2v);
    let singular_nodes = if p.a.abs() <= a_floor {
        let eps = singular_threshold(grid.h(), a_floor);
        let mut s: Vec<usize> = grid
            .axis_nodes()
            .iter()
            .copied()
            .filter(|&k| p.v.values()[k].abs() < eps)
            .collect();
        s.sort_unstable();
        s
    } else {
        Vec::new()
    };
    PairResidual {
        r1,
        r2,
        singular_nodes,
    }
}

/// `((f_x)² + y² + a²)^{-1/2} f_xx + 2 f_yy` at every node.
pub fn residual_potential(f: &GridField, a: f64) -> GridField {
    let grid = f.grid();
    let st = Stencils::new(grid);
    let vals = f.values();
    let mut out = vec![0.0; grid.value_count()];
    for (k, node) in grid.nodes().iter().enumerate() {
        let fx = st.x[k].first(vals, k);
        let fxx = st.x[k].second(vals, k);
        let fyy = st.y[k].second(vals, k);
        let w = fx * fx + node.y * node.y + a * a;
        out[k] = fxx / w.sqrt() + 2.0 * fyy;
    }
    extrapolate_to_boundary(grid, &mut out);
    GridField::new(grid.clone(), out)
}

/// `∂_x[(v² + y² + a²)^{-1/2} v_x] + 2 v_yy` by flux differencing at arm
/// midpoints.
pub fn residual_v_divergence(v: &GridField, a: f64) -> GridField {
    let grid = v.grid();
    let h = grid.h();
    let n = grid.node_count();
    let vals = v.values();
    let st = Stencils::new(grid);
    let coeff = |vm: f64, y: f64| (vm * vm + y * y + a * a).powf(-0.5);
    let mut out = vec![0.0; grid.value_count()];
    for (k, node) in grid.nodes().iter().enumerate() {
        let arms = grid.arms(k);
        let (east, west) = (arms[0], arms[1]);
        let (he, hw) = (east.len(h), west.len(h));
        let ve = vals[east.slot(n)];
        let vw = vals[west.slot(n)];
        let v0 = vals[k];
        let flux_e = coeff(0.5 * (v0 + ve), node.y) * (ve - v0) / he;
        let flux_w = coeff(0.5 * (v0 + vw), node.y) * (v0 - vw) / hw;
        let div_x = 2.0 * (flux_e - flux_w) / (he + hw);
        out[k] = div_x + 2.0 * st.y[k].second(vals, k);
    }
    extrapolate_to_boundary(grid, &mut out);
    GridField::new(grid.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;
    use std::sync::Arc;

    fn disc(h: f64) -> Arc<crate::grid::Grid> {
        build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), h).unwrap()
    }

    #[test]
    fn zero_pair_has_zero_residual() {
        let g = disc(0.1);
        let p = PairField::from_fn(&g, 1.0, |_, _| (0.0, 0.0));
        assert_eq!(residual_pair(&p).sup_norm(), 0.0);
    }

    #[test]
    fn affine_pair_is_annihilated_for_any_a() {
        let g = disc(0.05);
        for a in [-1.0, 0.0, 0.4, 1.0] {
            let p = PairField::from_fn(&g, a, |x, y| (0.3 * x - 0.2, 0.3 * y + 0.7));
            assert!(residual_pair(&p).sup_norm() < 1e-10);
        }
    }

    #[test]
    fn potential_residual_direct_substitution() {
        let g = disc(0.1);
        let f = GridField::from_fn(&g, |x, _| x * x);
        let r = residual_potential(&f, 1.0);
        let origin = g.node_at(0, 0).unwrap();
        assert!((r.values()[origin] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_potential_is_annihilated() {
        let g = disc(0.05);
        let f = GridField::from_fn(&g, |x, y| 0.7 * x - 0.2 * y + 0.3 * x * y);
        for a in [0.5, 1.0, 2.0] {
            assert!(residual_potential(&f, a).sup_norm() < 1e-9);
        }
    }

    #[test]
    fn divergence_residual_vanishes_on_simple_fields() {
        let g = disc(0.05);
        let c = GridField::from_fn(&g, |_, _| 0.8);
        assert!(residual_v_divergence(&c, 1.0).sup_norm() < 1e-12);
        let lin = GridField::from_fn(&g, |_, y| 0.3 * y + 0.7);
        assert!(residual_v_divergence(&lin, 1.0).sup_norm() < 1e-9);
    }

    #[test]
    fn singular_nodes_flagged_only_at_floor() {
        let g = disc(0.1);
        let p = PairField::from_fn(&g, 0.0, |_, y| (0.0, y));
        let r = residual_pair(&p);
        assert_eq!(r.singular_nodes.len(), g.axis_nodes().len());
        let p1 = PairField::from_fn(&g, 1.0, |_, y| (0.0, y));
        assert!(residual_pair(&p1).singular_nodes.is_empty());
    }
}
