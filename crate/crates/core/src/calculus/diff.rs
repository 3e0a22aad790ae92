//! Shortley–Weller difference stencils.
//!
//! For a node with arms `hm` (backward) and `hp` (forward) along one axis:
//!
//! ```text
//! g'  ≈ [hm² g₊ − hp² g₋ + (hp² − hm²) g₀] / (hm hp (hm + hp))
//! g'' ≈ 2/(hm + hp) · [(g₊ − g₀)/hp − (g₀ − g₋)/hm]
//! ```
//!
//! Both reduce to the central differences on regular nodes.

use crate::grid::{Arm, Dir, Grid};

use super::fields::GridField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn dirs(self) -> (Dir, Dir) {
        match self {
            Axis::X => (Dir::West, Dir::East),
            Axis::Y => (Dir::South, Dir::North),
        }
    }
}

/// Weights `(w₋, w₀, w₊)` of one node's stencil, and the value-vector slots
/// of the backward and forward arm ends.
#[derive(Debug, Clone, Copy)]
pub struct Stencil1d {
    pub minus: usize,
    pub plus: usize,
    pub d1: [f64; 3],
    pub d2: [f64; 3],
}

impl Stencil1d {
    pub fn new(grid: &Grid, node: usize, axis: Axis) -> Self {
        let (dm, dp) = axis.dirs();
        let h = grid.h();
        let n = grid.node_count();
        let am: Arm = grid.arm(node, dm);
        let ap: Arm = grid.arm(node, dp);
        let hm = am.len(h);
        let hp = ap.len(h);
        let denom = hm * hp * (hm + hp);
        let d1 = [-hp * hp / denom, (hp * hp - hm * hm) / denom, hm * hm / denom];
        let cm = 2.0 / (hm * (hm + hp));
        let cp = 2.0 / (hp * (hm + hp));
        let d2 = [cm, -(cm + cp), cp];
        Stencil1d {
            minus: am.slot(n),
            plus: ap.slot(n),
            d1,
            d2,
        }
    }

    #[inline]
    pub fn first(&self, values: &[f64], node: usize) -> f64 {
        self.d1[0] * values[self.minus] + self.d1[1] * values[node] + self.d1[2] * values[self.plus]
    }

    #[inline]
    pub fn second(&self, values: &[f64], node: usize) -> f64 {
        self.d2[0] * values[self.minus] + self.d2[1] * values[node] + self.d2[2] * values[self.plus]
    }
}

/// Precomputed x and y stencils for every interior node.
#[derive(Debug, Clone)]
pub struct Stencils {
    pub x: Vec<Stencil1d>,
    pub y: Vec<Stencil1d>,
}

impl Stencils {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.node_count();
        Stencils {
            x: (0..n).map(|k| Stencil1d::new(grid, k, Axis::X)).collect(),
            y: (0..n).map(|k| Stencil1d::new(grid, k, Axis::Y)).collect(),
        }
    }

    pub fn axis(&self, axis: Axis) -> &[Stencil1d] {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

/// Fills boundary-hit slots of a node-derived field by linear extrapolation
/// along the arm: `g(b) = g₀ + s·(g₀ − g_opposite)`.
pub(crate) fn extrapolate_to_boundary(grid: &Grid, values: &mut [f64]) {
    let n = grid.node_count();
    for (b, hit) in grid.hits().iter().enumerate() {
        let k = hit.node;
        let g0 = values[k];
        let v = match grid.arm(k, hit.dir.opposite()) {
            Arm::Node(m) => g0 + hit.frac * (g0 - values[m]),
            Arm::Boundary { .. } => g0,
        };
        values[n + b] = v;
    }
}

fn apply(field: &GridField, axis: Axis, second: bool) -> GridField {
    let grid = field.grid();
    let n = grid.node_count();
    let vals = field.values();
    let mut out = vec![0.0; grid.value_count()];
    for (k, o) in out.iter_mut().enumerate().take(n) {
        let st = Stencil1d::new(grid, k, axis);
        *o = if second {
            st.second(vals, k)
        } else {
            st.first(vals, k)
        };
    }
    extrapolate_to_boundary(grid, &mut out);
    GridField::new(grid.clone(), out)
}

/// ∂/∂x, second order on regular and cut-cell nodes.
pub fn diff_x(field: &GridField) -> GridField {
    apply(field, Axis::X, false)
}

/// ∂/∂y, second order on regular and cut-cell nodes.
pub fn diff_y(field: &GridField) -> GridField {
    apply(field, Axis::Y, false)
}

pub fn diff_xx(field: &GridField) -> GridField {
    apply(field, Axis::X, true)
}

pub fn diff_yy(field: &GridField) -> GridField {
    apply(field, Axis::Y, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;

    fn disc_grid(h: f64) -> std::sync::Arc<Grid> {
        build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), h).unwrap()
    }

    #[test]
    fn exact_on_linear_and_constant_fields() {
        let g = disc_grid(0.1);
        let fx = diff_x(&GridField::from_fn(&g, |x, _| x));
        assert!(fx.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let c = GridField::from_fn(&g, |_, _| 3.5);
        assert!(diff_x(&c).values().iter().all(|v| v.abs() < 1e-12));
        assert!(diff_y(&c).values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn exact_on_quadratics() {
        let g = disc_grid(0.07);
        let f = GridField::from_fn(&g, |x, y| x * x + 3.0 * x * y - y * y);
        let fx = diff_x(&f);
        let fyy = diff_yy(&f);
        for (k, n) in g.nodes().iter().enumerate() {
            assert!((fx.values()[k] - (2.0 * n.x + 3.0 * n.y)).abs() < 1e-11);
            assert!((fyy.values()[k] + 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn first_derivative_is_second_order() {
        let err = |h: f64| {
            let g = disc_grid(h);
            let f = GridField::from_fn(&g, |x, y| (2.0 * x).sin() * (y + 0.5).exp());
            let fx = diff_x(&f);
            g.nodes()
                .iter()
                .enumerate()
                .map(|(k, n)| (fx.values()[k] - 2.0 * (2.0 * n.x).cos() * (n.y + 0.5).exp()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.05) / err(0.025);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}
