//! Lifting planar pairs `(u, v)` to U(1)-invariant 3-folds in `C³`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::CliftError;
use crate::calculus::PairField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C3Point(pub [Complex64; 3]);

impl C3Point {
    pub fn new(z1: Complex64, z2: Complex64, z3: Complex64) -> Self {
        C3Point([z1, z2, z3])
    }

    pub fn z1(&self) -> Complex64 {
        self.0[0]
    }

    pub fn z2(&self) -> Complex64 {
        self.0[1]
    }

    pub fn z3(&self) -> Complex64 {
        self.0[2]
    }

    /// `|z₁|² − |z₂|²`.
    pub fn moment(&self) -> f64 {
        self.0[0].norm_sqr() - self.0[1].norm_sqr()
    }

    /// The six real coordinates `(Re z₁, Im z₁, Re z₂, Im z₂, Re z₃, Im z₃)`.
    pub fn reals(&self) -> [f64; 6] {
        let [a, b, c] = self.0;
        [a.re, a.im, b.re, b.im, c.re, c.im]
    }

    pub fn is_finite(&self) -> bool {
        self.reals().iter().all(|v| v.is_finite())
    }

    /// U(1) action `(e^{iσ} z₁, e^{−iσ} z₂, z₃)`.
    pub fn rotate(&self, sigma: f64) -> Self {
        let e = Complex64::from_polar(1.0, sigma);
        C3Point([self.0[0] * e, self.0[1] * e.conj(), self.0[2]])
    }
}

impl std::ops::Sub for C3Point {
    type Output = [Complex64; 3];
    fn sub(self, o: C3Point) -> [Complex64; 3] {
        [self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]]
    }
}

/// `(r₁, r₂)` with `r₁² − r₂² = 2a` and `r₁ r₂ = |v + iy|`.
pub fn lift_radii(a: f64, v: f64, y: f64) -> (f64, f64) {
    let s = v * v + y * y;
    let root = (a * a + s).sqrt();
    // the smaller square is computed without cancellation
    let (r1sq, r2sq) = if a >= 0.0 {
        let big = a + root;
        (big, if big > 0.0 { s / big } else { 0.0 })
    } else {
        let big = -a + root;
        (if big > 0.0 { s / big } else { 0.0 }, big)
    };
    (r1sq.sqrt(), r2sq.sqrt())
}

/// Point on the orbit over `(x, y)` at orbit angle `θ`: `z₁ = r₁e^{i(θ+χ)}`,
/// `z₂ = r₂e^{−iθ}`, `z₃ = x + iu`, with `χ = arg(v + iy)` (0 at `v = y = 0`).
pub fn lift_point(x: f64, y: f64, u: f64, v: f64, a: f64, theta: f64) -> C3Point {
    let (r1, r2) = lift_radii(a, v, y);
    let chi = if v == 0.0 && y == 0.0 { 0.0 } else { y.atan2(v) };
    C3Point([
        Complex64::from_polar(r1, theta + chi),
        Complex64::from_polar(r2, -theta),
        Complex64::new(x, u),
    ])
}

/// Structured 3-parameter sample of a 3-fold: points indexed by
/// `(i₀, i₁, i₂)` with per-axis parameter steps, periodicity, and a mask of
/// which entries exist.
#[derive(Debug, Clone)]
pub struct MeshPatch {
    dims: [usize; 3],
    steps: [f64; 3],
    periodic: [bool; 3],
    points: Vec<C3Point>,
    valid: Vec<bool>,
    /// Moment-map level for lifted solutions.
    pub a: Option<f64>,
}

impl MeshPatch {
    pub fn new(
        dims: [usize; 3],
        steps: [f64; 3],
        periodic: [bool; 3],
        points: Vec<C3Point>,
        valid: Vec<bool>,
    ) -> Result<Self, CliftError> {
        let n = dims.iter().product::<usize>();
        if points.len() != n || valid.len() != n {
            return Err(CliftError::ShapeMismatch {
                expected: n,
                got: points.len().min(valid.len()),
            });
        }
        if steps.iter().any(|s| !(*s > 0.0)) {
            return Err(CliftError::InvalidParameter("patch steps must be positive".into()));
        }
        Ok(MeshPatch {
            dims,
            steps,
            periodic,
            points,
            valid,
            a: None,
        })
    }

    /// Samples `f` on the product grid `start_d + k·step_d`, `k < dims_d`.
    pub fn from_fn(
        dims: [usize; 3],
        start: [f64; 3],
        steps: [f64; 3],
        periodic: [bool; 3],
        f: impl Fn(f64, f64, f64) -> Option<C3Point>,
    ) -> Result<Self, CliftError> {
        let mut points = Vec::with_capacity(dims.iter().product());
        let mut valid = Vec::with_capacity(points.capacity());
        for i0 in 0..dims[0] {
            for i1 in 0..dims[1] {
                for i2 in 0..dims[2] {
                    let p = f(
                        start[0] + i0 as f64 * steps[0],
                        start[1] + i1 as f64 * steps[1],
                        start[2] + i2 as f64 * steps[2],
                    );
                    valid.push(p.is_some());
                    points.push(p.unwrap_or(C3Point([Complex64::new(0.0, 0.0); 3])));
                }
            }
        }
        MeshPatch::new(dims, steps, periodic, points, valid)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn steps(&self) -> [f64; 3] {
        self.steps
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.dims[1] + i[1]) * self.dims[2] + i[2]
    }

    pub fn get(&self, i: [usize; 3]) -> Option<&C3Point> {
        let k = self.index(i);
        self.valid[k].then(|| &self.points[k])
    }

    /// Valid points in index order.
    pub fn valid_points(&self) -> impl Iterator<Item = ([usize; 3], &C3Point)> + '_ {
        let [_, d1, d2] = self.dims;
        self.points
            .iter()
            .enumerate()
            .filter(|(k, _)| self.valid[*k])
            .map(move |(k, p)| ([k / (d1 * d2), (k / d2) % d1, k % d2], p))
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Neighbour of `i` one step along `axis` in direction `dir` (±1).
    pub fn neighbour(&self, i: [usize; 3], axis: usize, dir: isize) -> Option<[usize; 3]> {
        let n = self.dims[axis] as isize;
        let mut k = i[axis] as isize + dir;
        if self.periodic[axis] {
            k = k.rem_euclid(n);
        } else if k < 0 || k >= n {
            return None;
        }
        let mut j = i;
        j[axis] = k as usize;
        self.valid[self.index(j)].then_some(j)
    }

    /// Largest `| |z₁|² − |z₂|² − 2a |` over valid points.
    pub fn moment_defect(&self, a: f64) -> f64 {
        self.valid_points()
            .map(|(_, p)| (p.moment() - 2.0 * a).abs())
            .fold(0.0, f64::max)
    }
}

/// Lifts every interior node of `pair` at `theta_count` orbit angles.
/// Axis 0 runs over grid columns, axis 1 over rows, axis 2 over angles.
pub fn lift_mesh(pair: &PairField, theta_count: usize) -> Result<MeshPatch, CliftError> {
    if theta_count < 8 {
        return Err(CliftError::InvalidParameter(format!(
            "theta_count must be at least 8, got {theta_count}"
        )));
    }
    let grid = pair.grid();
    let h = grid.h();
    let (i0, i1) = grid.i_range();
    let (j0, j1) = grid.j_range();
    let dims = [(i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize, theta_count];
    let dtheta = TAU / theta_count as f64;
    let mut patch = MeshPatch::from_fn(
        dims,
        [i0 as f64, j0 as f64, 0.0],
        [1.0, 1.0, dtheta],
        [false, false, true],
        |fi, fj, theta| {
            let k = grid.node_at(fi.round() as i32, fj.round() as i32)?;
            let node = &grid.nodes()[k];
            Some(lift_point(
                node.x,
                node.y,
                pair.u.values()[k],
                pair.v.values()[k],
                pair.a,
                theta,
            ))
        },
    )?;
    patch.steps = [h, h, dtheta];
    patch.a = Some(pair.a);
    Ok(patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn radii_examples() {
        assert_eq!(lift_radii(0.0, 0.0, 0.0), (0.0, 0.0));
        let (r1, r2) = lift_radii(1.0, 0.0, 0.0);
        assert!((r1 * r1 - 2.0).abs() < 1e-15 && r2 == 0.0);
        let (r1, r2) = lift_radii(0.0, 3.0, 4.0);
        assert!((r1 * r1 - 5.0).abs() < 1e-12 && (r2 * r2 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn point_examples() {
        let p = lift_point(0.0, 0.0, 0.0, 0.0, 0.0, 1.3);
        assert!(p.reals().iter().all(|v| *v == 0.0));
        let q = lift_point(1.0, 0.0, 2.0, 5.0, 0.0, 0.0);
        assert!((q.z1() * q.z2() - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        assert!((q.z1().norm_sqr() - 5.0).abs() < 1e-12);
        assert_eq!(q.z3(), Complex64::new(1.0, 2.0));
    }

    proptest! {
        #[test]
        fn lift_satisfies_defining_relations(
            x in -2.0..2.0f64, y in -2.0..2.0f64, u in -3.0..3.0f64, v in -3.0..3.0f64,
            a in -2.0..2.0f64, theta in 0.0..TAU,
        ) {
            let p = lift_point(x, y, u, v, a, theta);
            prop_assert!((p.moment() - 2.0 * a).abs() < 1e-10);
            prop_assert!((p.z1() * p.z2() - Complex64::new(v, y)).norm() < 1e-10);
            let (r1, r2) = lift_radii(a, v, y);
            prop_assert!((r1 * r1 * r2 * r2 - (v * v + y * y)).abs() < 1e-12 * (1.0 + v * v + y * y) * (1.0 + a.abs()));
        }

        #[test]
        fn lift_is_u1_equivariant(
            y in -2.0..2.0f64, v in -3.0..3.0f64, a in -2.0..2.0f64,
            theta in 0.0..TAU, sigma in 0.0..TAU,
        ) {
            let p = lift_point(0.3, y, -0.7, v, a, theta + sigma);
            let q = lift_point(0.3, y, -0.7, v, a, theta).rotate(sigma);
            let d = p - q;
            prop_assert!(d.iter().all(|z| z.norm() < 1e-12));
        }
    }
}
