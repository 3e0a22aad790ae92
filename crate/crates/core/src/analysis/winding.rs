//! Winding numbers of planar vector fields along closed contours.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::AnalysisError;

/// Minimum number of samples on a loop.
pub const MIN_LOOP_SAMPLES: usize = 64;
const MAX_LOOP_SAMPLES: usize = 1 << 18;
/// Largest allowed distance of the angle sum from an integer multiple of 2π,
/// in turns.
const ROUNDING_RESIDUE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Contour {
    Circle { center: [f64; 2], radius: f64 },
    DomainBoundary,
    Polygon,
}

/// Values `(w₁, w₂)` along a positively oriented closed contour, without
/// repeating the first sample at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSamples {
    points: Vec<[f64; 2]>,
    contour: Contour,
}

impl LoopSamples {
    pub fn new(points: Vec<[f64; 2]>, contour: Contour) -> Result<Self, AnalysisError> {
        if points.len() < MIN_LOOP_SAMPLES {
            return Err(AnalysisError::TooFewSamples {
                min: MIN_LOOP_SAMPLES,
                got: points.len(),
            });
        }
        let scale = points.iter().fold(0.0, |m: f64, p| m.max(p[0].hypot(p[1])));
        if let Some(idx) = points
            .iter()
            .position(|p| !(p[0].hypot(p[1]) > 1e-14 * scale) || !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(AnalysisError::ZeroOnContour { sample: idx });
        }
        Ok(LoopSamples { points, contour })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn contour(&self) -> Contour {
        self.contour
    }

    /// Principal-value angle increments between consecutive samples,
    /// including the closing one.
    pub fn increments(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|k| angle_between(self.points[k], self.points[(k + 1) % n]))
            .collect()
    }
}

#[inline]
pub(crate) fn angle_between(p: [f64; 2], q: [f64; 2]) -> f64 {
    let cross = p[0] * q[1] - p[1] * q[0];
    let dot = p[0] * q[0] + p[1] * q[1];
    cross.atan2(dot)
}

fn round_turns(total: f64) -> Result<i32, AnalysisError> {
    let turns = total / TAU;
    let k = turns.round();
    if (turns - k).abs() >= ROUNDING_RESIDUE {
        return Err(AnalysisError::UnderResolved { increment: total });
    }
    Ok(k as i32)
}

/// Sum of the angle increments over `2π`, rounded to an integer.
pub fn winding_number(samples: &LoopSamples) -> Result<i32, AnalysisError> {
    let incs = samples.increments();
    if let Some(&bad) = incs.iter().find(|d| d.abs() >= FRAC_PI_2) {
        return Err(AnalysisError::UnderResolved { increment: bad });
    }
    round_turns(incs.iter().sum())
}

/// Samples `w(t)`, `t ∈ [0, 1)`, starting at 64 points and doubling until
/// every increment is below `π/2`.
pub fn sample_loop<F>(w: F, contour: Contour) -> Result<LoopSamples, AnalysisError>
where
    F: Fn(f64) -> Option<[f64; 2]>,
{
    let mut n = MIN_LOOP_SAMPLES;
    loop {
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 / n as f64;
            points.push(w(t).ok_or(AnalysisError::OutsideRegion)?);
        }
        let samples = LoopSamples::new(points, contour)?;
        let worst = samples
            .increments()
            .iter()
            .fold(0.0, |m: f64, d| m.max(d.abs()));
        if worst < FRAC_PI_2 {
            return Ok(samples);
        }
        if n >= MAX_LOOP_SAMPLES {
            return Err(AnalysisError::UnderResolved { increment: worst });
        }
        n *= 2;
    }
}

/// Winding of `field(x, y)` along the circle of the given center and radius.
pub fn circle_winding<F>(field: F, center: [f64; 2], radius: f64) -> Result<i32, AnalysisError>
where
    F: Fn(f64, f64) -> Option<[f64; 2]>,
{
    let samples = sample_loop(
        |t| {
            let (s, c) = (TAU * t).sin_cos();
            field(center[0] + radius * c, center[1] + radius * s)
        },
        Contour::Circle { center, radius },
    )?;
    winding_number(&samples)
}

/// Exact winding of the piecewise-linear path through `vertices` (closed).
/// Each straight segment turns by the principal angle between its end
/// values, so no sampling is involved.
pub fn polyline_winding(vertices: &[[f64; 2]]) -> Result<i32, AnalysisError> {
    let n = vertices.len();
    let mut total = 0.0;
    for k in 0..n {
        let p = vertices[k];
        let q = vertices[(k + 1) % n];
        let cross = p[0] * q[1] - p[1] * q[0];
        let dot = p[0] * q[0] + p[1] * q[1];
        let scale = p[0].hypot(p[1]) * q[0].hypot(q[1]);
        if scale == 0.0 || (cross.abs() <= 1e-14 * scale && dot <= 0.0) {
            return Err(AnalysisError::ZeroOnContour { sample: k });
        }
        total += cross.atan2(dot);
    }
    round_turns(total)
}

/// Whether the convex hull of `vectors` avoids the origin, i.e. all of them
/// lie in an open half-plane.
pub fn hull_excludes_origin(vectors: impl IntoIterator<Item = [f64; 2]>) -> bool {
    let mut angles = Vec::new();
    for v in vectors {
        if v[0] == 0.0 && v[1] == 0.0 {
            return false;
        }
        angles.push(v[1].atan2(v[0]));
    }
    if angles.is_empty() {
        return true;
    }
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + TAU - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap > PI + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn power_loop(k: i32, n: usize) -> LoopSamples {
        let pts = (0..n)
            .map(|m| {
                let w = Complex64::from_polar(1.0, TAU * m as f64 / n as f64).powi(k);
                [w.re, w.im]
            })
            .collect();
        LoopSamples::new(pts, Contour::Polygon).unwrap()
    }

    #[test]
    fn basic_loops() {
        assert_eq!(winding_number(&power_loop(1, 64)).unwrap(), 1);
        let conj2: Vec<[f64; 2]> = (0..64)
            .map(|m| {
                let t = TAU * m as f64 / 64.0;
                [(2.0 * t).cos(), -(2.0 * t).sin()]
            })
            .collect();
        assert_eq!(winding_number(&LoopSamples::new(conj2, Contour::Polygon).unwrap()).unwrap(), -2);
        let constant = vec![[3.0, 4.0]; 64];
        assert_eq!(winding_number(&LoopSamples::new(constant, Contour::Polygon).unwrap()).unwrap(), 0);
    }

    #[test]
    fn loop_invariants_enforced() {
        assert!(matches!(
            LoopSamples::new(vec![[1.0, 0.0]; 10], Contour::Polygon),
            Err(AnalysisError::TooFewSamples { .. })
        ));
        let mut pts = vec![[1.0, 0.0]; 64];
        pts[5] = [0.0, 0.0];
        assert!(matches!(
            LoopSamples::new(pts, Contour::Polygon),
            Err(AnalysisError::ZeroOnContour { sample: 5 })
        ));
        // 64 samples of z^20 turn by 2π·20/64 > π/2 per step
        let coarse = power_loop(20, 64);
        assert!(matches!(winding_number(&coarse), Err(AnalysisError::UnderResolved { .. })));
    }

    #[test]
    fn adaptive_sampling_resolves_high_powers() {
        let k = circle_winding(
            |x, y| {
                let w = Complex64::new(x - 0.2, y + 0.1).powi(9);
                Some([w.re, w.im])
            },
            [0.2, -0.1],
            0.3,
        )
        .unwrap();
        assert_eq!(k, 9);
    }

    #[test]
    fn polyline_detects_zero_crossing() {
        let square = [[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]];
        assert_eq!(polyline_winding(&square).unwrap(), 1);
        let through = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(polyline_winding(&through), Err(AnalysisError::ZeroOnContour { .. })));
    }

    #[test]
    fn hull_test() {
        assert!(hull_excludes_origin([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]));
        assert!(!hull_excludes_origin([[1.0, 0.0], [-1.0, 0.1], [0.0, -1.0]]));
        assert!(!hull_excludes_origin([[0.0, 0.0]]));
    }

    proptest! {
        #[test]
        fn power_maps_wind_k_times(k in -5i32..=5, cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.01..3.0f64) {
            let c = [cx, cy];
            let got = circle_winding(
                |x, y| {
                    let w = Complex64::new(x - c[0], y - c[1]).powi(k);
                    Some([w.re, w.im])
                },
                c,
                r,
            ).unwrap();
            prop_assert_eq!(got, k);
        }

        #[test]
        fn loops_away_from_zero_do_not_wind(k in 1i32..=4, off in 1.5..5.0f64, phase in 0.0..TAU) {
            let z0 = Complex64::from_polar(off, phase);
            let got = circle_winding(
                |x, y| {
                    let w = (Complex64::new(x, y) - z0).powi(k);
                    Some([w.re, w.im])
                },
                [0.0, 0.0],
                1.0,
            ).unwrap();
            prop_assert_eq!(got, 0);
        }
    }
}
