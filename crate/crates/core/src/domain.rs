//! Strictly convex planar domains symmetric about the x-axis.
//!
//! Every supported domain is star-shaped about the origin, so its boundary
//! is described by a polar radius function `r(θ)`. Boundary data, curvature
//! checks and grid intersections are all expressed in terms of the polar
//! angle θ.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of boundary samples used for the curvature test.
pub const CONVEXITY_SAMPLES: usize = 512;
/// Curvature must exceed this at every sample.
pub const CURVATURE_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("domain is not strictly convex: curvature {curvature:.3e} at theta = {theta:.6}")]
    NonConvexDomain { theta: f64, curvature: f64 },
    #[error("domain is not symmetric under (x, y) -> (x, -y): {0}")]
    AsymmetricDomain(String),
    #[error("invalid domain parameters: {0}")]
    InvalidParameters(String),
    #[error("need at least {min} boundary samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// Raw, unvalidated domain description, as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainParams {
    Ellipse {
        semi_axes: [f64; 2],
    },
    Radial {
        cos_coeffs: Vec<f64>,
        #[serde(default)]
        sin_coeffs: Vec<f64>,
    },
}

impl DomainParams {
    pub fn unit_disc() -> Self {
        DomainParams::Ellipse {
            semi_axes: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DomainKind {
    /// Ellipse `x²/p² + y²/q² = 1`.
    Ellipse { p: f64, q: f64 },
    /// `r(θ) = Σ c_j cos jθ`.
    Radial { cos_coeffs: Vec<f64> },
}

/// A validated domain. Construct through [`make_domain`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSpec {
    kind: DomainKind,
    diameter: f64,
}

/// Validates `params` and returns the domain.
pub fn make_domain(params: &DomainParams) -> Result<DomainSpec, DomainError> {
    let kind = match params {
        DomainParams::Ellipse { semi_axes: [p, q] } => {
            if !(p.is_finite() && q.is_finite() && *p > 0.0 && *q > 0.0) {
                return Err(DomainError::InvalidParameters(format!(
                    "semi-axes must be positive, got ({p}, {q})"
                )));
            }
            DomainKind::Ellipse { p: *p, q: *q }
        }
        DomainParams::Radial {
            cos_coeffs,
            sin_coeffs,
        } => {
            if let Some((j, s)) = sin_coeffs.iter().enumerate().find(|(_, s)| **s != 0.0) {
                return Err(DomainError::AsymmetricDomain(format!(
                    "sine coefficient {j} is {s}; radial domains take cosine terms only"
                )));
            }
            if cos_coeffs.is_empty() || cos_coeffs.iter().any(|c| !c.is_finite()) {
                return Err(DomainError::InvalidParameters(
                    "radial domain needs finite cosine coefficients".into(),
                ));
            }
            DomainKind::Radial {
                cos_coeffs: cos_coeffs.clone(),
            }
        }
    };
    let mut domain = DomainSpec {
        kind,
        diameter: 0.0,
    };

    for k in 0..CONVEXITY_SAMPLES {
        let theta = TAU * k as f64 / CONVEXITY_SAMPLES as f64;
        let r = domain.radius(theta);
        if !(r > 0.0) {
            return Err(DomainError::InvalidParameters(format!(
                "radius {r} is not positive at theta = {theta}"
            )));
        }
        let kappa = domain.curvature(theta);
        if !(kappa > CURVATURE_FLOOR) {
            return Err(DomainError::NonConvexDomain {
                theta,
                curvature: kappa,
            });
        }
    }
    domain.diameter = domain.compute_diameter();
    Ok(domain)
}

impl DomainSpec {
    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Polar radius of the boundary and its first two θ-derivatives.
    pub fn radius_derivs(&self, theta: f64) -> (f64, f64, f64) {
        match &self.kind {
            DomainKind::Ellipse { p, q } => {
                let (s, c) = theta.sin_cos();
                let g = q * q * c * c + p * p * s * s;
                let dg = (p * p - q * q) * (2.0 * theta).sin();
                let ddg = 2.0 * (p * p - q * q) * (2.0 * theta).cos();
                let pq = p * q;
                let r = pq / g.sqrt();
                let dr = -0.5 * pq * g.powf(-1.5) * dg;
                let ddr = pq * (0.75 * g.powf(-2.5) * dg * dg - 0.5 * g.powf(-1.5) * ddg);
                (r, dr, ddr)
            }
            DomainKind::Radial { cos_coeffs } => {
                let mut r = 0.0;
                let mut dr = 0.0;
                let mut ddr = 0.0;
                for (j, c) in cos_coeffs.iter().enumerate() {
                    let jf = j as f64;
                    let (s, co) = (jf * theta).sin_cos();
                    r += c * co;
                    dr -= c * jf * s;
                    ddr -= c * jf * jf * co;
                }
                (r, dr, ddr)
            }
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        match &self.kind {
            // symmetric closed form keeps r(θ) = r(-θ) bit-exact
            DomainKind::Ellipse { p, q } => {
                let (s, c) = theta.sin_cos();
                p * q / (q * q * c * c + p * p * s * s).sqrt()
            }
            DomainKind::Radial { .. } => self.radius_derivs(theta).0,
        }
    }

    /// Signed curvature of the boundary curve at polar angle θ.
    pub fn curvature(&self, theta: f64) -> f64 {
        let (r, dr, ddr) = self.radius_derivs(theta);
        (r * r + 2.0 * dr * dr - r * ddr) / (r * r + dr * dr).powf(1.5)
    }

    pub fn boundary_point(&self, theta: f64) -> (f64, f64) {
        let r = self.radius(theta);
        (r * theta.cos(), r * theta.sin())
    }

    /// Negative strictly inside, zero on the boundary, positive outside.
    pub fn level(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            DomainKind::Ellipse { p, q } => (x / p).powi(2) + (y / q).powi(2) - 1.0,
            DomainKind::Radial { .. } => {
                let rho = x.hypot(y);
                if rho == 0.0 {
                    return -self.radius(0.0);
                }
                rho - self.radius(y.abs().atan2(x))
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.level(x, y) < 0.0
    }

    /// Distance `t ∈ (0, max_t]` along the ray `(x, y) + t·(dx, dy)` (unit axis
    /// direction) at which it leaves the domain. The ray start must be inside.
    /// Computed on `|y|` so mirrored rays give identical answers.
    pub fn ray_exit(&self, x: f64, y: f64, dx: f64, dy: f64, max_t: f64) -> f64 {
        let flip = y < 0.0 || (y == 0.0 && dy < 0.0);
        let (y, dy) = if flip { (-y, -dy) } else { (y, dy) };
        match &self.kind {
            DomainKind::Ellipse { p, q } => {
                if dy == 0.0 {
                    let half = p * (1.0 - (y / q).powi(2)).max(0.0).sqrt();
                    if dx > 0.0 {
                        half - x
                    } else {
                        x + half
                    }
                } else {
                    let half = q * (1.0 - (x / p).powi(2)).max(0.0).sqrt();
                    if dy > 0.0 {
                        half - y
                    } else {
                        y + half
                    }
                }
                .clamp(f64::MIN_POSITIVE, max_t)
            }
            DomainKind::Radial { .. } => {
                let mut lo = 0.0;
                let mut hi = max_t;
                if self.level(x + hi * dx, y + hi * dy) < 0.0 {
                    return max_t;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.level(x + mid * dx, y + mid * dy) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    fn compute_diameter(&self) -> f64 {
        let n = CONVEXITY_SAMPLES;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| self.boundary_point(TAU * k as f64 / n as f64))
            .collect();
        let mut best: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max((a.0 - b.0).hypot(a.1 - b.1));
            }
        }
        best
    }

    /// Speed `|dP/dθ|` of the polar parameterization.
    fn speed(&self, theta: f64) -> f64 {
        let (r, dr, _) = self.radius_derivs(theta);
        r.hypot(dr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub arclength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySamples {
    pub points: Vec<BoundaryPoint>,
    /// Arclength of the closed loop, i.e. the value at θ = 2π.
    pub total_length: f64,
}

/// Samples `n ≥ 64` equally spaced polar angles on `∂S` with cumulative
/// arclength (5-point Gauss–Legendre per interval).
pub fn sample_boundary(domain: &DomainSpec, n: usize) -> Result<BoundarySamples, DomainError> {
    if n < 64 {
        return Err(DomainError::TooFewSamples { min: 64, got: n });
    }
    const GL_X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const GL_W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let dtheta = TAU / n as f64;
    let mut points = Vec::with_capacity(n);
    let mut s = 0.0;
    for k in 0..n {
        let theta = dtheta * k as f64;
        let (x, y) = domain.boundary_point(theta);
        points.push(BoundaryPoint {
            theta,
            x,
            y,
            arclength: s,
        });
        let mid = theta + 0.5 * dtheta;
        let seg: f64 = GL_X
            .iter()
            .zip(GL_W.iter())
            .map(|(xi, wi)| wi * domain.speed(mid + 0.5 * dtheta * xi))
            .sum();
        s += 0.5 * dtheta * seg;
    }
    Ok(BoundarySamples {
        points,
        total_length: s,
    })
}

/// Maps any angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Polar angle of a point, in `[0, 2π)`.
pub fn polar_angle(x: f64, y: f64) -> f64 {
    let t = y.atan2(x);
    if t < 0.0 {
        wrap_angle(t + TAU)
    } else if t >= PI * 2.0 {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(c: &[f64]) -> DomainParams {
        DomainParams::Radial {
            cos_coeffs: c.to_vec(),
            sin_coeffs: vec![],
        }
    }

    /// Independent curvature oracle on the raw trig polynomial.
    fn min_curvature_oracle(c: &[f64]) -> f64 {
        (0..CONVEXITY_SAMPLES)
            .map(|k| {
                let t = TAU * k as f64 / CONVEXITY_SAMPLES as f64;
                let r: f64 = c.iter().enumerate().map(|(j, a)| a * (j as f64 * t).cos()).sum();
                let r1: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(j, a)| -a * j as f64 * (j as f64 * t).sin())
                    .sum();
                let r2: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(j, a)| -a * (j * j) as f64 * (j as f64 * t).cos())
                    .sum();
                (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn unit_disc_has_unit_curvature() {
        let d = make_domain(&DomainParams::unit_disc()).unwrap();
        for k in 0..64 {
            let t = k as f64 * 0.1;
            assert!((d.curvature(t) - 1.0).abs() < 1e-12);
        }
        assert!((d.diameter() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mild_radial_perturbation_is_convex() {
        assert!(min_curvature_oracle(&[1.0, 0.0, 0.1]) > 0.0);
        assert!(make_domain(&radial(&[1.0, 0.0, 0.1])).is_ok());
    }

    #[test]
    fn strong_radial_perturbation_is_rejected() {
        assert!(min_curvature_oracle(&[1.0, 0.0, 0.9]) < 0.0);
        assert!(matches!(
            make_domain(&radial(&[1.0, 0.0, 0.9])),
            Err(DomainError::NonConvexDomain { .. })
        ));
    }

    #[test]
    fn sine_terms_are_asymmetric() {
        let p = DomainParams::Radial {
            cos_coeffs: vec![1.0],
            sin_coeffs: vec![0.0, 0.05],
        };
        assert!(matches!(make_domain(&p), Err(DomainError::AsymmetricDomain(_))));
    }

    #[test]
    fn ellipse_radius_derivatives_match_finite_differences() {
        let d = make_domain(&DomainParams::Ellipse {
            semi_axes: [2.0, 1.0],
        })
        .unwrap();
        let e = 1e-5;
        for k in 0..20 {
            let t = 0.3 * k as f64;
            let (_, dr, ddr) = d.radius_derivs(t);
            let fd1 = (d.radius(t + e) - d.radius(t - e)) / (2.0 * e);
            let fd2 = (d.radius(t + e) - 2.0 * d.radius(t) + d.radius(t - e)) / (e * e);
            assert!((dr - fd1).abs() < 1e-7);
            assert!((ddr - fd2).abs() < 1e-3);
        }
    }

    #[test]
    fn boundary_samples_on_circle() {
        let d = make_domain(&DomainParams::unit_disc()).unwrap();
        assert!(sample_boundary(&d, 4).is_err());
        let s = sample_boundary(&d, 64).unwrap();
        for p in &s.points {
            assert!((p.x.hypot(p.y) - 1.0).abs() < 1e-12);
        }
        assert!((s.total_length - TAU).abs() < 1e-12);
        assert!(s.points.windows(2).all(|w| w[1].arclength > w[0].arclength));
    }

    /// Perimeter via the arithmetic-geometric mean form of E(k).
    fn ellipse_perimeter_agm(a: f64, b: f64) -> f64 {
        let (mut x, mut y) = (a, b);
        let mut sum = 0.5 * (a * a + b * b);
        let mut c2 = a * a - b * b;
        let mut pow = 0.5;
        while c2 > 1e-30 {
            let xn = 0.5 * (x + y);
            let yn = (x * y).sqrt();
            c2 = (0.5 * (x - y)).powi(2);
            pow *= 2.0;
            sum -= pow * c2;
            x = xn;
            y = yn;
        }
        2.0 * PI * sum / x
    }

    #[test]
    fn ellipse_perimeter_matches_agm_oracle() {
        let oracle = ellipse_perimeter_agm(2.0, 1.0);
        assert!((oracle - 9.6884).abs() < 1e-4, "oracle {oracle}");
        let d = make_domain(&DomainParams::Ellipse {
            semi_axes: [2.0, 1.0],
        })
        .unwrap();
        let s = sample_boundary(&d, 256).unwrap();
        assert!((s.total_length - oracle).abs() < 1e-9, "{}", s.total_length);
    }

    #[test]
    fn boundary_samples_are_reflection_invariant() {
        for params in [
            DomainParams::Ellipse {
                semi_axes: [1.5, 0.7],
            },
            radial(&[1.0, 0.05, 0.1]),
        ] {
            let d = make_domain(&params).unwrap();
            let s = sample_boundary(&d, 128).unwrap();
            let n = s.points.len();
            for k in 1..n {
                let a = s.points[k];
                let b = s.points[n - k];
                assert!((a.x - b.x).abs() < 1e-12 && (a.y + b.y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ray_exit_lands_on_boundary() {
        let d = make_domain(&radial(&[1.0, 0.05, 0.1])).unwrap();
        for &(x, y, dx, dy) in &[(0.2, 0.3, 1.0, 0.0), (0.2, -0.3, 0.0, -1.0), (-0.5, 0.1, -1.0, 0.0)] {
            let t = d.ray_exit(x, y, dx, dy, 5.0);
            assert!(d.level(x + t * dx, y + t * dy).abs() < 1e-12);
        }
    }
}
