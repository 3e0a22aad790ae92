//! Pullbacks of the Kähler form `ω` and of `Im Ω` to sampled 3-folds.

use num_complex::Complex64;
use serde::Serialize;

use super::lift::MeshPatch;

/// Frames with Gram volume below this are skipped.
pub const DEGENERATE_VOLUME: f64 = 1e-14;

pub type Tangent = [Complex64; 3];

/// `ω(X, Y) = Σ_j Im(conj(X_j) Y_j)`.
pub fn omega(x: &Tangent, y: &Tangent) -> f64 {
    (0..3).map(|j| (x[j].conj() * y[j]).im).sum()
}

/// `Ω(X, Y, Z) = det[X Y Z]` for `Ω = dz₁ ∧ dz₂ ∧ dz₃`.
pub fn big_omega(x: &Tangent, y: &Tangent, z: &Tangent) -> Complex64 {
    x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0]) + x[2] * (y[0] * z[1] - y[1] * z[0])
}

fn real_inner(x: &Tangent, y: &Tangent) -> f64 {
    (0..3).map(|j| (x[j].conj() * y[j]).re).sum()
}

fn norm(x: &Tangent) -> f64 {
    real_inner(x, x).sqrt()
}

/// Volume of the real frame: `√det G`, `G_ij = Re⟨t_i, t_j⟩`.
pub fn frame_volume(t: &[Tangent; 3]) -> f64 {
    let g = |i: usize, j: usize| real_inner(&t[i], &t[j]);
    let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    det.max(0.0).sqrt()
}

/// Per-frame residuals: normalized `|ω(t_i, t_j)|` for the three pairs and
/// `|Im Ω| / vol`. `None` for degenerate frames.
pub fn frame_residuals(t: &[Tangent; 3]) -> Option<([f64; 3], f64)> {
    let vol = frame_volume(t);
    if !(vol > DEGENERATE_VOLUME) {
        return None;
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let om = pairs.map(|(i, j)| omega(&t[i], &t[j]).abs() / (norm(&t[i]) * norm(&t[j])));
    let im = big_omega(&t[0], &t[1], &t[2]).im.abs() / vol;
    Some((om, im))
}

/// Summary of calibration residuals over a patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationEval {
    pub omega_max: f64,
    pub omega_mean: f64,
    pub im_omega_max: f64,
    pub im_omega_mean: f64,
    /// Frames evaluated.
    pub samples: usize,
    /// Frames skipped for vanishing volume.
    pub degenerate: usize,
}

/// Centered-difference tangent frame at `i`, if both neighbours exist on
/// every axis.
pub fn patch_frame(patch: &MeshPatch, i: [usize; 3]) -> Option<[Tangent; 3]> {
    let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (axis, slot) in t.iter_mut().enumerate() {
        let plus = patch.neighbour(i, axis, 1)?;
        let minus = patch.neighbour(i, axis, -1)?;
        let d = *patch.get(plus)? - *patch.get(minus)?;
        let s = 2.0 * patch.steps()[axis];
        *slot = d.map(|z| z / s);
    }
    Some(t)
}

/// Residuals of `ω|_L = 0` and `Im Ω|_L = 0` over every interior point of
/// the patch.
pub fn sl_residual(patch: &MeshPatch) -> CalibrationEval {
    let mut eval = CalibrationEval {
        omega_max: 0.0,
        omega_mean: 0.0,
        im_omega_max: 0.0,
        im_omega_mean: 0.0,
        samples: 0,
        degenerate: 0,
    };
    for (i, _) in patch.valid_points() {
        let Some(frame) = patch_frame(patch, i) else { continue };
        match frame_residuals(&frame) {
            Some((om, im)) => {
                let w = om.iter().copied().fold(0.0, f64::max);
                eval.omega_max = eval.omega_max.max(w);
                eval.omega_mean += w;
                eval.im_omega_max = eval.im_omega_max.max(im);
                eval.im_omega_mean += im;
                eval.samples += 1;
            }
            None => eval.degenerate += 1,
        }
    }
    if eval.samples > 0 {
        eval.omega_mean /= eval.samples as f64;
        eval.im_omega_mean /= eval.samples as f64;
    }
    eval
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clift::lift::C3Point;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_plane_is_calibrated() {
        let t = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let (om, im) = frame_residuals(&t).unwrap();
        assert!(om.iter().all(|v| *v == 0.0));
        assert_eq!(im, 0.0);
        assert_eq!(big_omega(&t[0], &t[1], &t[2]), c(1.0, 0.0));
    }

    #[test]
    fn lagrangian_plane_with_wrong_phase() {
        let t = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        ];
        let (om, im) = frame_residuals(&t).unwrap();
        assert!(om.iter().all(|v| *v == 0.0));
        assert!((im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_patch_residuals_vanish() {
        let patch = MeshPatch::from_fn([6, 6, 6], [0.0; 3], [0.1; 3], [false; 3], |a, b, d| {
            Some(C3Point::new(c(a, 0.0), c(b, 0.0), c(d, 0.0)))
        })
        .unwrap();
        let e = sl_residual(&patch);
        assert_eq!(e.samples, 64);
        assert!(e.omega_max <= 1e-10 && e.im_omega_max <= 1e-10);
    }

    #[test]
    fn symplectic_pair_is_detected() {
        let x = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let y = [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(omega(&x, &y), 1.0);
    }
}
