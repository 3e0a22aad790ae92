//! The explicit piecewise-smooth fibration `F: C³ → R × C` and its fibres.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::examples::sampler_hl;
use super::lift::{C3Point, MeshPatch};
use super::CliftError;

/// Round-trip tolerance for sampled fibre points.
pub const ROUND_TRIP_TOL: f64 = 1e-10;
/// Fibre samples cover `r ∈ [0, FIBRE_RADIUS]` in the model parameterization.
pub const FIBRE_RADIUS: f64 = 2.0;

/// `F(z) = (a, b)` with `2a = |z₁|² − |z₂|²` and
/// `b = z₃` if `z₁ = z₂ = 0`, `z₃ + z̄₁z̄₂/|z₁|` if `a ≥ 0`,
/// `z₃ + z̄₁z̄₂/|z₂|` if `a < 0`.
pub fn fibration_map_explicit(p: &C3Point) -> (f64, Complex64) {
    let [z1, z2, z3] = p.0;
    let a = 0.5 * (z1.norm_sqr() - z2.norm_sqr());
    let prod = (z1 * z2).conj();
    let b = if z1 == Complex64::new(0.0, 0.0) && z2 == Complex64::new(0.0, 0.0) {
        z3
    } else if a >= 0.0 {
        z3 + prod / z1.norm()
    } else {
        z3 + prod / z2.norm()
    };
    (a, b)
}

/// Point of `F⁻¹(a, b)` over the model point `w ∈ N_{|a|}`:
/// `(w₁, w₂, b − w₃)` for `a ≥ 0`, `(w₂, w₁, b − w₃)` for `a < 0`.
pub fn fibre_point(a: f64, b: Complex64, r: f64, theta2: f64, theta3: f64) -> Result<C3Point, CliftError> {
    let w = sampler_hl(a.abs(), r, theta2, theta3)?;
    let [w1, w2, w3] = w.0;
    Ok(if a >= 0.0 {
        C3Point::new(w1, w2, b - w3)
    } else {
        C3Point::new(w2, w1, b - w3)
    })
}

fn check_round_trip(a: f64, b: Complex64, p: &C3Point) -> Result<(), CliftError> {
    let (fa, fb) = fibration_map_explicit(p);
    let err = (fa - a).abs().max((fb - b).norm());
    if err > ROUND_TRIP_TOL * (1.0 + b.norm()) {
        return Err(CliftError::RoundTripFailed { a, error: err });
    }
    Ok(())
}

/// `n³` points of `F⁻¹(a, b)`: `n` radii in `[0, FIBRE_RADIUS]` (the first
/// is the cone point `(0, 0, b)` when `a = 0`) times `n × n` torus angles.
pub fn fibre_sample(a: f64, b: Complex64, n: usize) -> Result<Vec<C3Point>, CliftError> {
    if n < 8 {
        return Err(CliftError::InvalidParameter(format!("fibre_sample needs n >= 8, got {n}")));
    }
    if !a.is_finite() || !b.re.is_finite() || !b.im.is_finite() {
        return Err(CliftError::InvalidParameter("fibre parameters must be finite".into()));
    }
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        let r = FIBRE_RADIUS * i as f64 / (n - 1) as f64;
        for j in 0..n {
            for k in 0..n {
                let p = fibre_point(a, b, r, TAU * j as f64 / n as f64, TAU * k as f64 / n as f64)?;
                check_round_trip(a, b, &p)?;
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Structured patch of `F⁻¹(a, b)` over `r ∈ [r_min, r_max]` (axis 0) and
/// the two torus angles (axes 1, 2, periodic).
pub fn fibre_patch(
    a: f64,
    b: Complex64,
    r_range: (f64, f64),
    dims: [usize; 3],
) -> Result<MeshPatch, CliftError> {
    let (r0, r1) = r_range;
    if !(r0 >= 0.0 && r1 > r0) || dims.iter().any(|d| *d < 3) {
        return Err(CliftError::InvalidParameter(format!(
            "bad fibre patch: r in [{r0}, {r1}], dims {dims:?}"
        )));
    }
    let steps = [
        (r1 - r0) / (dims[0] - 1) as f64,
        TAU / dims[1] as f64,
        TAU / dims[2] as f64,
    ];
    let mut patch = MeshPatch::from_fn(dims, [r0, 0.0, 0.0], steps, [false, true, true], |r, t2, t3| {
        fibre_point(a, b, r, t2, t3).ok()
    })?;
    for (_, p) in patch.valid_points() {
        check_round_trip(a, b, p)?;
    }
    patch.a = Some(a);
    Ok(patch)
}

/// `F`-value discrepancies of point pairs straddling `|z₁| = |z₂|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeamReport {
    pub gaps: Vec<f64>,
    /// Largest `max(|Δa|, |Δb|)` over the pair grid, per gap.
    pub discrepancies: Vec<f64>,
    /// Least-squares slope of log discrepancy against log gap.
    pub order: f64,
}

/// For each gap `g`, pairs `p±` with `|z₁|² = R² ± g/2`, `|z₂| = R` over a
/// grid of radii, phases and `z₃`, so `p₊` is evaluated by the `a ≥ 0`
/// branch and `p₋` by the `a < 0` branch.
pub fn seam_continuity(gaps: &[f64]) -> Result<SeamReport, CliftError> {
    if gaps.len() < 2 || gaps.iter().any(|g| !(*g > 0.0)) {
        return Err(CliftError::InvalidParameter("need at least two positive gaps".into()));
    }
    let radii = [0.25, 0.5, 1.0, 2.0];
    let phases = 6;
    let z3s = [Complex64::new(0.0, 0.0), Complex64::new(-0.7, 1.3)];
    let mut discrepancies = Vec::with_capacity(gaps.len());
    for &g in gaps {
        let mut worst: f64 = 0.0;
        for &r in &radii {
            if r * r <= g {
                continue;
            }
            for j in 0..phases {
                for k in 0..phases {
                    let (s1, s2) = (TAU * j as f64 / phases as f64, TAU * k as f64 / phases as f64);
                    for &z3 in &z3s {
                        let z2 = Complex64::from_polar(r, s2);
                        let plus = C3Point::new(Complex64::from_polar((r * r + 0.5 * g).sqrt(), s1), z2, z3);
                        let minus = C3Point::new(Complex64::from_polar((r * r - 0.5 * g).sqrt(), s1), z2, z3);
                        let (ap, bp) = fibration_map_explicit(&plus);
                        let (am, bm) = fibration_map_explicit(&minus);
                        worst = worst.max((ap - am).abs().max((bp - bm).norm()));
                    }
                }
            }
        }
        discrepancies.push(worst);
    }
    let xs: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = discrepancies.iter().map(|d| d.ln()).collect();
    Ok(SeamReport {
        gaps: gaps.to_vec(),
        discrepancies,
        order: ls_slope(&xs, &ys),
    })
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
