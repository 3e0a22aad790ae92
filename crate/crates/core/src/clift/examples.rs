//! Closed-form solution pairs and the Harvey–Lawson family `N_a`.

use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lift::{C3Point, MeshPatch};
use super::CliftError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AnalyticExample {
    /// `u = αx + β`, `v = αy + γ`; a solution for every `a`.
    Linear { alpha: f64, beta: f64, gamma: f64 },
    /// `u = y tanh x`, `v = ½y² sech²x − ½cosh²x` at `a = 0`.
    Catenoid,
    /// `u = |y| − ½cosh 2x`, `v = −y sinh 2x` at `a = 0`.
    Twosheet,
}

impl AnalyticExample {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            AnalyticExample::Linear { alpha, beta, gamma } => (alpha * x + beta, alpha * y + gamma),
            AnalyticExample::Catenoid => {
                let sech = 1.0 / x.cosh();
                (y * x.tanh(), 0.5 * y * y * sech * sech - 0.5 * x.cosh().powi(2))
            }
            AnalyticExample::Twosheet => (y.abs() - 0.5 * (2.0 * x).cosh(), -y * (2.0 * x).sinh()),
        }
    }

    /// `a` values for which the pair is a solution; `None` means any.
    pub fn fixed_a(&self) -> Option<f64> {
        match self {
            AnalyticExample::Linear { .. } => None,
            _ => Some(0.0),
        }
    }
}

impl FromStr for AnalyticExample {
    type Err = CliftError;

    /// `linear(α,β,γ)`, `catenoid` or `twosheet`.
    fn from_str(s: &str) -> Result<Self, CliftError> {
        let s = s.trim();
        match s {
            "catenoid" => return Ok(AnalyticExample::Catenoid),
            "twosheet" => return Ok(AnalyticExample::Twosheet),
            _ => {}
        }
        let args = s
            .strip_prefix("linear(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| CliftError::UnknownName(s.to_string()))?;
        let vals: Vec<f64> = args
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliftError::UnknownName(s.to_string()))?;
        match vals[..] {
            [alpha, beta, gamma] => Ok(AnalyticExample::Linear { alpha, beta, gamma }),
            _ => Err(CliftError::UnknownName(s.to_string())),
        }
    }
}

/// Point of `N_a` (`a ≥ 0`): `z₂ = re^{iθ₂}`, `z₃ = re^{iθ₃}`,
/// `z₁ = √(r² + 2a) e^{−i(θ₂+θ₃)}`.
pub fn sampler_hl(a: f64, r: f64, theta2: f64, theta3: f64) -> Result<C3Point, CliftError> {
    if a < 0.0 || r < 0.0 {
        return Err(CliftError::InvalidParameter(format!(
            "Harvey-Lawson sampler needs a >= 0 and r >= 0 (a = {a}, r = {r})"
        )));
    }
    Ok(C3Point::new(
        Complex64::from_polar((r * r + 2.0 * a).sqrt(), -(theta2 + theta3)),
        Complex64::from_polar(r, theta2),
        Complex64::from_polar(r, theta3),
    ))
}

/// Structured patch of `N_a` over `r ∈ [r_min, r_max]` (axis 0) and the
/// angles `θ₂`, `θ₃` (axes 1, 2, periodic).
pub fn hl_patch(a: f64, r_range: (f64, f64), dims: [usize; 3]) -> Result<MeshPatch, CliftError> {
    let (r0, r1) = r_range;
    if a < 0.0 || !(r0 >= 0.0 && r1 > r0) || dims.iter().any(|d| *d < 3) {
        return Err(CliftError::InvalidParameter(format!(
            "bad Harvey-Lawson patch: a = {a}, r in [{r0}, {r1}], dims {dims:?}"
        )));
    }
    let steps = [
        (r1 - r0) / (dims[0] - 1) as f64,
        TAU / dims[1] as f64,
        TAU / dims[2] as f64,
    ];
    let mut patch = MeshPatch::from_fn(dims, [r0, 0.0, 0.0], steps, [false, true, true], |r, t2, t3| {
        sampler_hl(a, r, t2, t3).ok()
    })?;
    patch.a = Some(a);
    Ok(patch)
}

/// Defining relations of `N_a`: `|z₁|² − 2a = |z₂|² = |z₃|²`,
/// `Im(z₁z₂z₃) = 0`, `Re(z₁z₂z₃) ≥ 0`. Returns the largest violation.
pub fn hl_defect(a: f64, p: &C3Point) -> f64 {
    let (n1, n2, n3) = (p.z1().norm_sqr(), p.z2().norm_sqr(), p.z3().norm_sqr());
    let prod = p.z1() * p.z2() * p.z3();
    [
        (n1 - 2.0 * a - n2).abs(),
        (n2 - n3).abs(),
        prod.im.abs(),
        (-prod.re).max(0.0),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}
