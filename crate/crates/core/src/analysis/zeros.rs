//! Zeros of the difference of two solution pairs: location, multiplicity
//! and the holomorphic normal form around a nonsingular zero.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::winding::{circle_winding, hull_excludes_origin, polyline_winding, sample_loop, winding_number, Contour};
use super::AnalysisError;
use crate::calculus::{singular_threshold, PairField, DEFAULT_A_FLOOR};
use crate::grid::Grid;

/// Zeros closer than this many grid spacings are merged.
pub const CLUSTER_SPACINGS: f64 = 4.0;
/// Relative size below which the difference counts as identically zero.
const IDENTICAL_TOL: f64 = 1e-10;
/// Relative residual of the normal-form fit above which it is rejected.
const FIT_TOL: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub b: f64,
    pub c: f64,
    pub multiplicity: i32,
    pub singular: bool,
    /// Radius of the circle used for the multiplicity; 0 when the circle
    /// could not be placed and the enclosed cell windings were summed.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSearch {
    pub zeros: Vec<ZeroRecord>,
    /// Winding of the difference along the domain boundary.
    pub boundary_winding: i32,
    /// Number of quadtree blocks visited.
    pub blocks_visited: usize,
}

impl ZeroSearch {
    pub fn total_multiplicity(&self) -> i32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

/// `(u₁ − u₂, v₁ − v₂)` with bilinear interpolation.
pub(crate) struct Difference {
    grid: Arc<Grid>,
    w1: Vec<f64>,
    w2: Vec<f64>,
}

impl Difference {
    pub(crate) fn new(p1: &PairField, p2: &PairField) -> Result<Self, AnalysisError> {
        if !Arc::ptr_eq(p1.grid(), p2.grid()) {
            return Err(AnalysisError::GridMismatch);
        }
        if p1.a != p2.a {
            return Err(AnalysisError::ParameterMismatch {
                a1: p1.a,
                a2: p2.a,
            });
        }
        let d = p1.difference(p2);
        Ok(Difference {
            grid: p1.grid().clone(),
            w1: d.u.into_values(),
            w2: d.v.into_values(),
        })
    }

    fn slot(&self, s: usize) -> [f64; 2] {
        [self.w1[s], self.w2[s]]
    }

    fn node(&self, i: i32, j: i32) -> Option<[f64; 2]> {
        self.grid.node_at(i, j).map(|k| self.slot(k))
    }

    pub(crate) fn at(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        let h = self.grid.h();
        let (fi, fj) = ((x / h).floor(), (y / h).floor());
        let (i, j) = (fi as i32, fj as i32);
        let (tx, ty) = (x / h - fi, y / h - fj);
        let c00 = self.node(i, j)?;
        let c10 = self.node(i + 1, j)?;
        let c01 = self.node(i, j + 1)?;
        let c11 = self.node(i + 1, j + 1)?;
        let mix = |m: usize| {
            (1.0 - tx) * (1.0 - ty) * c00[m] + tx * (1.0 - ty) * c10[m] + (1.0 - tx) * ty * c01[m] + tx * ty * c11[m]
        };
        Some([mix(0), mix(1)])
    }

    fn sup(&self) -> f64 {
        self.w1
            .iter()
            .zip(&self.w2)
            .fold(0.0, |m: f64, (a, b)| m.max(a.hypot(*b)))
    }

    /// Whether the dual cell around node `(i, j)` is covered by complete
    /// grid cells.
    fn in_region(&self, i: i32, j: i32) -> bool {
        (-1..=1).all(|di| (-1..=1).all(|dj| self.grid.node_at(i + di, j + dj).is_some()))
    }

    /// Exact winding of the interpolant along the boundary of the dual cell
    /// `[i−½, i+½] × [j−½, j+½]`. The bilinear interpolant is linear on each
    /// of the eight straight pieces between edge midpoints and cell corners.
    fn cell_winding(&self, i: i32, j: i32) -> Result<i32, AnalysisError> {
        let n = |di: i32, dj: i32| self.node(i + di, j + dj).expect("cell inside region");
        let avg = |ps: &[[f64; 2]]| {
            let k = ps.len() as f64;
            [ps.iter().map(|p| p[0]).sum::<f64>() / k, ps.iter().map(|p| p[1]).sum::<f64>() / k]
        };
        let c = n(0, 0);
        let corner = |sx: i32, sy: i32| avg(&[c, n(sx, 0), n(0, sy), n(sx, sy)]);
        let mid = |dx: i32, dy: i32| avg(&[c, n(dx, dy)]);
        let ring = [
            corner(1, -1),
            mid(1, 0),
            corner(1, 1),
            mid(0, 1),
            corner(-1, 1),
            mid(-1, 0),
            corner(-1, -1),
            mid(0, -1),
        ];
        polyline_winding(&ring)
    }

    fn boundary_winding(&self) -> Result<i32, AnalysisError> {
        let n = self.grid.node_count();
        let mut order: Vec<usize> = (0..self.grid.hits().len()).collect();
        order.sort_by(|&a, &b| self.grid.hits()[a].theta.total_cmp(&self.grid.hits()[b].theta));
        let pts: Vec<[f64; 2]> = order.iter().map(|&b| self.slot(n + b)).collect();
        let samples = super::winding::LoopSamples::new(pts, Contour::DomainBoundary)?;
        winding_number(&samples)
    }

    /// Newton iteration on the interpolant from `(x0, y0)`, kept within
    /// `reach` of the start.
    fn locate(&self, x0: f64, y0: f64, reach: f64) -> (f64, f64) {
        let h = self.grid.h();
        let d = 1e-6 * h;
        let (mut x, mut y) = (x0, y0);
        for _ in 0..40 {
            let Some(w) = self.at(x, y) else { break };
            let (Some(wx), Some(wy)) = (self.at(x + d, y), self.at(x, y + d)) else {
                break;
            };
            let j = [
                [(wx[0] - w[0]) / d, (wy[0] - w[0]) / d],
                [(wx[1] - w[1]) / d, (wy[1] - w[1]) / d],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dx = (j[1][1] * w[0] - j[0][1] * w[1]) / det;
            let dy = (j[0][0] * w[1] - j[1][0] * w[0]) / det;
            let (nx, ny) = (x - dx, y - dy);
            if (nx - x0).hypot(ny - y0) > reach {
                return (x0, y0);
            }
            x = nx;
            y = ny;
            if dx.hypot(dy) < 1e-13 * h {
                return (x, y);
            }
        }
        if (x - x0).hypot(y - y0) <= reach && self.at(x, y).is_some() {
            (x, y)
        } else {
            (x0, y0)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Block {
    i0: i32,
    i1: i32,
    j0: i32,
    j1: i32,
}

struct Quadtree<'a> {
    diff: &'a Difference,
    hits: Vec<(i32, i32, i32)>,
    visited: usize,
}

impl Quadtree<'_> {
    fn visit(&mut self, b: Block) -> Result<(), AnalysisError> {
        self.visited += 1;
        let d = self.diff;
        let any_cell = (b.i0..=b.i1).any(|i| (b.j0..=b.j1).any(|j| d.in_region(i, j)));
        if !any_cell {
            return Ok(());
        }
        let corner_values = (b.i0 - 1..=b.i1 + 1)
            .flat_map(|i| (b.j0 - 1..=b.j1 + 1).map(move |j| (i, j)))
            .filter_map(|(i, j)| d.node(i, j));
        if hull_excludes_origin(corner_values) {
            return Ok(());
        }
        if b.i0 == b.i1 && b.j0 == b.j1 {
            if d.in_region(b.i0, b.j0) {
                let w = d.cell_winding(b.i0, b.j0)?;
                if w != 0 {
                    self.hits.push((b.i0, b.j0, w));
                }
            }
            return Ok(());
        }
        let im = b.i0 + (b.i1 - b.i0) / 2;
        let jm = b.j0 + (b.j1 - b.j0) / 2;
        let is = if b.i0 == b.i1 { vec![(b.i0, b.i1)] } else { vec![(b.i0, im), (im + 1, b.i1)] };
        let js = if b.j0 == b.j1 { vec![(b.j0, b.j1)] } else { vec![(b.j0, jm), (jm + 1, b.j1)] };
        for &(i0, i1) in &is {
            for &(j0, j1) in &js {
                self.visit(Block { i0, i1, j0, j1 })?;
            }
        }
        Ok(())
    }
}

fn find_root(parent: &mut [usize], mut k: usize) -> usize {
    while parent[k] != k {
        parent[k] = parent[parent[k]];
        k = parent[k];
    }
    k
}

/// Zeros of `(u₁, v₁) − (u₂, v₂)` in the interior, with multiplicities, and
/// the boundary winding they must add up to.
pub fn find_zeros(p1: &PairField, p2: &PairField) -> Result<ZeroSearch, AnalysisError> {
    find_zeros_with(p1, p2, DEFAULT_A_FLOOR)
}

pub fn find_zeros_with(p1: &PairField, p2: &PairField, a_floor: f64) -> Result<ZeroSearch, AnalysisError> {
    let diff = Difference::new(p1, p2)?;
    let grid = diff.grid.clone();
    let h = grid.h();
    let field_scale = [&p1.u, &p1.v, &p2.u, &p2.v]
        .iter()
        .fold(0.0, |m: f64, f| m.max(f.sup_norm()));
    let sup = diff.sup();
    if sup <= IDENTICAL_TOL * (1.0 + field_scale) {
        return Err(AnalysisError::IdenticalSolutions { sup });
    }
    let n = grid.node_count();
    for (b, hit) in grid.hits().iter().enumerate() {
        let w = diff.slot(n + b);
        if w[0].hypot(w[1]) <= IDENTICAL_TOL * sup {
            return Err(AnalysisError::ZeroOnBoundary { x: hit.x, y: hit.y });
        }
    }
    let boundary_winding = diff.boundary_winding()?;

    let (i_lo, i_hi) = grid.i_range();
    let (j_lo, j_hi) = grid.j_range();
    let mut tree = Quadtree {
        diff: &diff,
        hits: Vec::new(),
        visited: 0,
    };
    tree.visit(Block {
        i0: i_lo,
        i1: i_hi,
        j0: j_lo,
        j1: j_hi,
    })?;
    let cells = tree.hits;
    let blocks_visited = tree.visited;

    let located: Vec<(f64, f64)> = cells
        .iter()
        .map(|&(i, j, _)| diff.locate(i as f64 * h, j as f64 * h, 0.75 * h))
        .collect();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            let d = (located[a].0 - located[b].0).hypot(located[a].1 - located[b].1);
            if d <= CLUSTER_SPACINGS * h {
                let (ra, rb) = (find_root(&mut parent, a), find_root(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot_of = vec![usize::MAX; cells.len()];
    for k in 0..cells.len() {
        let r = find_root(&mut parent, k);
        if slot_of[r] == usize::MAX {
            slot_of[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot_of[r]].push(k);
    }

    let centres: Vec<(f64, f64, f64)> = clusters
        .iter()
        .map(|members| {
            let wsum: f64 = members.iter().map(|&m| cells[m].2.unsigned_abs() as f64).sum();
            let bx = members.iter().map(|&m| located[m].0 * cells[m].2.unsigned_abs() as f64).sum::<f64>() / wsum;
            let by = members.iter().map(|&m| located[m].1 * cells[m].2.unsigned_abs() as f64).sum::<f64>() / wsum;
            let spread = members
                .iter()
                .map(|&m| (located[m].0 - bx).hypot(located[m].1 - by))
                .fold(0.0, f64::max);
            (bx, by, spread)
        })
        .collect();

    let eps = singular_threshold(h, a_floor);
    let mut zeros = Vec::new();
    for (ci, members) in clusters.iter().enumerate() {
        let cell_sum: i32 = members.iter().map(|&m| cells[m].2).sum();
        let (bx, by, spread) = centres[ci];
        let nearest = centres
            .iter()
            .enumerate()
            .filter(|(cj, _)| *cj != ci)
            .map(|(_, c)| (c.0 - bx).hypot(c.1 - by) - c.2)
            .fold(f64::INFINITY, f64::min);
        let radius = spread + 2.0 * h;
        let circle = if radius < 0.5 * nearest {
            circle_winding(|x, y| diff.at(x, y), [bx, by], radius).ok()
        } else {
            None
        };
        let (k, used_radius) = match circle {
            Some(k) if k == cell_sum => (k, radius),
            _ => (cell_sum, 0.0),
        };
        if k == 0 {
            continue;
        }
        let singular = by.abs() <= 0.5 * h
            && p1.a.abs() <= a_floor
            && [&p1.v, &p2.v]
                .iter()
                .all(|v| v.interpolate(bx, 0.0).is_some_and(|val| val.abs() < eps));
        zeros.push(ZeroRecord {
            b: bx,
            c: by,
            multiplicity: k,
            singular,
            radius: used_radius,
        });
    }
    zeros.sort_by(|a, b| a.b.total_cmp(&b.b).then(a.c.total_cmp(&b.c)));

    let total: i32 = zeros.iter().map(|z| z.multiplicity).sum();
    if total != boundary_winding {
        return Err(AnalysisError::WindingMismatch {
            boundary: boundary_winding,
            interior: total,
        });
    }
    Ok(ZeroSearch {
        zeros,
        boundary_winding,
        blocks_visited,
    })
}

/// Winding of the difference around `center` at radii `radius` and
/// `radius / 2`; both must agree and be nonzero.
pub fn multiplicity_at(
    p1: &PairField,
    p2: &PairField,
    center: [f64; 2],
    radius: f64,
) -> Result<i32, AnalysisError> {
    let diff = Difference::new(p1, p2)?;
    let outer = circle_winding(|x, y| diff.at(x, y), center, radius)?;
    let inner = circle_winding(|x, y| diff.at(x, y), center, 0.5 * radius)?;
    if outer != inner {
        return Err(AnalysisError::Unstable { outer, inner });
    }
    if outer == 0 {
        return Err(AnalysisError::NotAZero);
    }
    Ok(outer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingOrderFit {
    pub k_fit: f64,
    pub c_fit: [f64; 2],
    pub lambda: f64,
    /// RMS of `D − C ζ^k` relative to `|C| ρ^k`, worst over the circles.
    pub residual: f64,
}

impl LeadingOrderFit {
    pub fn c_complex(&self) -> Complex64 {
        Complex64::new(self.c_fit[0], self.c_fit[1])
    }
}

/// Fits `λ(u₁−u₂) + i(v₁−v₂) ≈ C (λ(x−b) + i(y−c))^k` on circles
/// `|ζ| = ρ, 0.8ρ, 0.64ρ` in the rescaled variable `ζ`.
pub fn leading_order_fit(
    p1: &PairField,
    p2: &PairField,
    zero: &ZeroRecord,
    rho: f64,
) -> Result<LeadingOrderFit, AnalysisError> {
    let diff = Difference::new(p1, p2)?;
    let (b, c, a) = (zero.b, zero.c, p1.a);
    let v1 = p1.v.interpolate(b, c).ok_or(AnalysisError::OutsideRegion)?;
    let lambda = 2f64.sqrt() * (v1 * v1 + c * c + a * a).powf(0.25);
    if lambda < 1e-6 {
        return Err(AnalysisError::SingularZero { lambda });
    }
    let radii = [rho, 0.8 * rho, 0.64 * rho];
    let mut circles = Vec::new();
    for &r in &radii {
        let samples = sample_loop(
            |t| {
                let zeta = Complex64::from_polar(r, std::f64::consts::TAU * t);
                let w = diff.at(b + zeta.re / lambda, c + zeta.im)?;
                Some([lambda * w[0], w[1]])
            },
            Contour::Circle { center: [b, c], radius: r },
        )?;
        let pts: Vec<(Complex64, Complex64)> = samples
            .points()
            .iter()
            .enumerate()
            .map(|(m, w)| {
                let t = std::f64::consts::TAU * m as f64 / samples.points().len() as f64;
                (Complex64::from_polar(r, t), Complex64::new(w[0], w[1]))
            })
            .collect();
        circles.push((r, pts));
    }
    let logs: Vec<(f64, f64)> = circles
        .iter()
        .map(|(r, pts)| {
            let mean = pts.iter().map(|(_, d)| d.norm().ln()).sum::<f64>() / pts.len() as f64;
            (r.ln(), mean)
        })
        .collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / logs.len() as f64;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / logs.len() as f64;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let k_fit = sxy / sxx;
    let k = k_fit.round() as i32;

    let mut c_sum = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    for (_, pts) in &circles {
        for (zeta, d) in pts {
            c_sum += d / zeta.powi(k);
            count += 1.0;
        }
    }
    let c_fit = c_sum / count;
    let mut residual: f64 = 0.0;
    for (r, pts) in &circles {
        let ss: f64 = pts.iter().map(|(zeta, d)| (d - c_fit * zeta.powi(k)).norm_sqr()).sum();
        let rms = (ss / pts.len() as f64).sqrt();
        residual = residual.max(rms / (c_fit.norm() * r.powi(k)));
    }
    if !(residual <= FIT_TOL) || c_fit.norm() == 0.0 {
        return Err(AnalysisError::FitPoor { residual });
    }
    Ok(LeadingOrderFit {
        k_fit,
        c_fit: [c_fit.re, c_fit.im],
        lambda,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;

    fn disc(h: f64) -> Arc<Grid> {
        build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), h).unwrap()
    }

    /// Pair whose difference from the zero pair is `λ u + i v = w(λx + iy)`.
    fn holomorphic_pair(g: &Arc<Grid>, a: f64, lambda: f64, w: impl Fn(Complex64) -> Complex64) -> PairField {
        PairField::from_fn(g, a, |x, y| {
            let d = w(Complex64::new(lambda * x, y));
            (d.re / lambda, d.im)
        })
    }

    fn zero_pair(g: &Arc<Grid>, a: f64) -> PairField {
        PairField::from_fn(g, a, |_, _| (0.0, 0.0))
    }

    #[test]
    fn constant_shift_has_no_zeros() {
        let g = disc(0.05);
        let p1 = PairField::from_fn(&g, 1.0, |x, y| (0.3 * x - 0.2, 0.3 * y + 0.7));
        let p2 = PairField::from_fn(&g, 1.0, |x, y| (0.3 * x + 0.1, 0.3 * y + 0.5));
        let s = find_zeros(&p1, &p2).unwrap();
        assert!(s.zeros.is_empty());
        assert_eq!(s.boundary_winding, 0);
    }

    #[test]
    fn identical_and_boundary_zero_are_errors() {
        let g = disc(0.05);
        let p = PairField::from_fn(&g, 1.0, |x, y| (x, y));
        assert!(matches!(find_zeros(&p, &p.clone()), Err(AnalysisError::IdenticalSolutions { .. })));
        // difference (x − 1, y) vanishes at the boundary point (1, 0)
        let q = PairField::from_fn(&g, 1.0, |x, y| (x - 1.0, y));
        let z = zero_pair(&g, 1.0);
        assert!(matches!(find_zeros(&q, &z), Err(AnalysisError::ZeroOnBoundary { .. })));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let g = disc(0.1);
        let g2 = disc(0.1);
        assert_eq!(
            find_zeros(&zero_pair(&g, 1.0), &zero_pair(&g2, 1.0)).unwrap_err(),
            AnalysisError::GridMismatch
        );
        assert!(matches!(
            find_zeros(&zero_pair(&g, 1.0), &zero_pair(&g, 0.5)),
            Err(AnalysisError::ParameterMismatch { .. })
        ));
    }

    #[test]
    fn double_zero_in_normal_form() {
        let g = disc(0.05);
        let lambda = 2f64.sqrt();
        let z0 = Complex64::new(lambda * 0.13, -0.21);
        let p1 = holomorphic_pair(&g, 1.0, lambda, |z| (z - z0).powi(2) * Complex64::new(2.0, 1.0));
        let s = find_zeros(&p1, &zero_pair(&g, 1.0)).unwrap();
        assert_eq!(s.boundary_winding, 2);
        assert_eq!(s.zeros.len(), 1);
        assert_eq!(s.zeros[0].multiplicity, 2);
        assert!((s.zeros[0].b - 0.13).abs() < 0.05 && (s.zeros[0].c + 0.21).abs() < 0.05);
    }

    #[test]
    fn multiplicity_at_normal_forms() {
        let g = disc(0.02);
        for k in 1..=3 {
            let p1 = holomorphic_pair(&g, 1.0, 2f64.sqrt(), |z| z.powi(k));
            assert_eq!(multiplicity_at(&p1, &zero_pair(&g, 1.0), [0.0, 0.0], 0.3).unwrap(), k);
        }
        let p1 = holomorphic_pair(&g, 1.0, 2f64.sqrt(), |z| z - Complex64::new(0.5, 0.0));
        assert_eq!(
            multiplicity_at(&p1, &zero_pair(&g, 1.0), [-0.3, 0.0], 0.1).unwrap_err(),
            AnalysisError::NotAZero
        );
        // a second zero between the two radii
        let p2 = holomorphic_pair(&g, 1.0, 2f64.sqrt(), |z| z * (z - Complex64::new(0.0, 0.2)));
        assert_eq!(
            multiplicity_at(&p2, &zero_pair(&g, 1.0), [0.0, 0.0], 0.3).unwrap_err(),
            AnalysisError::Unstable { outer: 2, inner: 1 }
        );
    }

    #[test]
    fn fit_recovers_normal_form() {
        let g = disc(0.02);
        let lambda = 2f64.sqrt();
        let c = Complex64::from_polar(2.0, std::f64::consts::FRAC_PI_4);
        let p1 = holomorphic_pair(&g, 1.0, lambda, |z| c * z.powi(2));
        let zero = ZeroRecord {
            b: 0.0,
            c: 0.0,
            multiplicity: 2,
            singular: false,
            radius: 0.0,
        };
        let fit = leading_order_fit(&p1, &zero_pair(&g, 1.0), &zero, 0.4).unwrap();
        assert!((fit.lambda - lambda).abs() < 1e-12);
        assert!((fit.k_fit - 2.0).abs() < 0.02, "{fit:?}");
        assert!((fit.c_complex() - c).norm() < 0.02 * c.norm(), "{fit:?}");
    }
}
