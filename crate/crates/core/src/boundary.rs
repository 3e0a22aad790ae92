//! Dirichlet data on the domain boundary.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{wrap_angle, DomainSpec};

pub const MIN_BOUNDARY_SAMPLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("need at least {MIN_BOUNDARY_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample parameters must be strictly increasing within [0, 2pi)")]
    BadParameters,
    #[error("non-finite boundary value")]
    NonFinite,
}

/// Monomial `coeff · x^px · y^py` evaluated at the boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub px: u32,
    pub py: u32,
    pub coeff: f64,
}

impl Monomial {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeff * x.powi(self.px as i32) * y.powi(self.py as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
enum Source {
    /// `Σ c_j cos jθ + s_j sin jθ`.
    Trig { cos: Vec<f64>, sin: Vec<f64> },
    /// Periodic cubic Hermite interpolant of measured samples.
    Sampled { theta: Vec<f64>, values: Vec<f64> },
}

/// Boundary function `φ` on `∂S`, parameterized by polar angle.
///
/// The value is `source(θ) + Σ monomials(x(θ), y(θ))`. Closed forms (trig
/// terms and monomials) are evaluated exactly; file-sampled data is
/// interpolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFunction {
    source: Source,
    poly: Vec<Monomial>,
    pub smoothness: String,
}

impl BoundaryFunction {
    pub fn zero() -> Self {
        Self::trig(vec![], vec![])
    }

    pub fn trig(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        BoundaryFunction {
            source: Source::Trig { cos, sin },
            poly: vec![],
            smoothness: "C-infinity".into(),
        }
    }

    /// Restriction of a polynomial in `(x, y)` to the boundary.
    pub fn polynomial(terms: Vec<Monomial>) -> Self {
        BoundaryFunction {
            source: Source::Trig {
                cos: vec![],
                sin: vec![],
            },
            poly: terms,
            smoothness: "C-infinity".into(),
        }
    }

    /// `γx + βy + αxy` restricted to the boundary.
    pub fn bilinear(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::polynomial(vec![
            Monomial {
                px: 1,
                py: 0,
                coeff: gamma,
            },
            Monomial {
                px: 0,
                py: 1,
                coeff: beta,
            },
            Monomial {
                px: 1,
                py: 1,
                coeff: alpha,
            },
        ])
    }

    /// Interpolating boundary function from `(θ_i, φ_i)` samples.
    pub fn from_samples(theta: Vec<f64>, values: Vec<f64>) -> Result<Self, BoundaryError> {
        if theta.len() < MIN_BOUNDARY_SAMPLES || theta.len() != values.len() {
            return Err(BoundaryError::TooFewSamples(theta.len().min(values.len())));
        }
        if theta[0] < 0.0
            || *theta.last().unwrap() >= TAU
            || theta.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(BoundaryError::BadParameters);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(BoundaryError::NonFinite);
        }
        Ok(BoundaryFunction {
            source: Source::Sampled { theta, values },
            poly: vec![],
            smoothness: "C1 (interpolated)".into(),
        })
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.source, Source::Trig { .. })
    }

    /// Trigonometric coefficients, when the source is a trig polynomial.
    pub fn trig_coeffs(&self) -> Option<(&[f64], &[f64])> {
        match &self.source {
            Source::Trig { cos, sin } => Some((cos, sin)),
            Source::Sampled { .. } => None,
        }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.poly
    }

    /// Value at polar angle θ, where `(x, y)` is the boundary point at θ.
    pub fn eval_at(&self, theta: f64, x: f64, y: f64) -> f64 {
        let base = match &self.source {
            Source::Trig { cos, sin } => {
                let mut acc = 0.0;
                for (j, c) in cos.iter().enumerate() {
                    acc += c * (j as f64 * theta).cos();
                }
                for (j, s) in sin.iter().enumerate() {
                    acc += s * (j as f64 * theta).sin();
                }
                acc
            }
            Source::Sampled { theta: ts, values } => hermite_periodic(ts, values, theta),
        };
        base + self.poly.iter().map(|m| m.eval(x, y)).sum::<f64>()
    }

    pub fn eval(&self, domain: &DomainSpec, theta: f64) -> f64 {
        let (x, y) = domain.boundary_point(theta);
        self.eval_at(theta, x, y)
    }

    /// Samples at `n` equally spaced angles.
    pub fn sample(&self, domain: &DomainSpec, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                (t, self.eval(domain, t))
            })
            .collect()
    }

    /// `φ + b·x + c·y`.
    pub fn with_affine(&self, b: f64, c: f64) -> Self {
        let mut out = self.clone();
        if b != 0.0 {
            out.poly.push(Monomial {
                px: 1,
                py: 0,
                coeff: b,
            });
        }
        if c != 0.0 {
            out.poly.push(Monomial {
                px: 0,
                py: 1,
                coeff: c,
            });
        }
        out
    }

    /// `φ` plus the given monomials.
    pub fn with_monomials(&self, terms: &[Monomial]) -> Self {
        let mut out = self.clone();
        out.poly.extend_from_slice(terms);
        out
    }

    /// `φ'(x, y) = -φ(x, -y)`.
    pub fn reflected(&self) -> Self {
        let source = match &self.source {
            Source::Trig { cos, sin } => Source::Trig {
                cos: cos.iter().map(|c| -c).collect(),
                sin: sin.clone(),
            },
            Source::Sampled { theta, values } => {
                let mut pairs: Vec<(f64, f64)> = theta
                    .iter()
                    .zip(values)
                    .map(|(t, v)| (wrap_angle(-t), -v))
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                Source::Sampled {
                    theta: pairs.iter().map(|p| p.0).collect(),
                    values: pairs.iter().map(|p| p.1).collect(),
                }
            }
        };
        let poly = self
            .poly
            .iter()
            .map(|m| Monomial {
                coeff: if m.py % 2 == 0 { -m.coeff } else { m.coeff },
                ..*m
            })
            .collect();
        BoundaryFunction {
            source,
            poly,
            smoothness: self.smoothness.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let source = match &self.source {
            Source::Trig { cos, sin } => Source::Trig {
                cos: cos.iter().map(|c| c * factor).collect(),
                sin: sin.iter().map(|s| s * factor).collect(),
            },
            Source::Sampled { theta, values } => Source::Sampled {
                theta: theta.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        };
        BoundaryFunction {
            source,
            poly: self
                .poly
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * factor,
                    ..*m
                })
                .collect(),
            smoothness: self.smoothness.clone(),
        }
    }

    /// `self - other`. Exact when both are closed forms; otherwise resampled
    /// on `n` points.
    pub fn difference(&self, other: &Self, domain: &DomainSpec, n: usize) -> Self {
        match (&self.source, &other.source) {
            (Source::Trig { cos: c1, sin: s1 }, Source::Trig { cos: c2, sin: s2 }) => {
                let sub = |a: &[f64], b: &[f64]| -> Vec<f64> {
                    (0..a.len().max(b.len()))
                        .map(|j| a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0))
                        .collect()
                };
                let mut poly = self.poly.clone();
                poly.extend(other.poly.iter().map(|m| Monomial {
                    coeff: -m.coeff,
                    ..*m
                }));
                BoundaryFunction {
                    source: Source::Trig {
                        cos: sub(c1, c2),
                        sin: sub(s1, s2),
                    },
                    poly,
                    smoothness: self.smoothness.clone(),
                }
            }
            _ => {
                let n = n.max(MIN_BOUNDARY_SAMPLES);
                let (theta, values): (Vec<f64>, Vec<f64>) = (0..n)
                    .map(|k| {
                        let t = TAU * k as f64 / n as f64;
                        (t, self.eval(domain, t) - other.eval(domain, t))
                    })
                    .unzip();
                BoundaryFunction {
                    source: Source::Sampled { theta, values },
                    poly: vec![],
                    smoothness: "C1 (interpolated)".into(),
                }
            }
        }
    }
}

/// Periodic cubic Hermite interpolation with finite-difference slopes.
fn hermite_periodic(ts: &[f64], vs: &[f64], theta: f64) -> f64 {
    let n = ts.len();
    let t = wrap_angle(theta);
    // index of the last sample <= t (cyclically)
    let k = match ts.partition_point(|&s| s <= t) {
        0 => n - 1,
        p => p - 1,
    };
    let k1 = (k + 1) % n;
    let gap = |a: usize, b: usize| -> f64 {
        let d = ts[b] - ts[a];
        if d <= 0.0 {
            d + TAU
        } else {
            d
        }
    };
    let slope = |i: usize| -> f64 {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        let hl = gap(prev, i);
        let hr = gap(i, next);
        let dl = (vs[i] - vs[prev]) / hl;
        let dr = (vs[next] - vs[i]) / hr;
        (hr * dl + hl * dr) / (hl + hr)
    };
    let h = gap(k, k1);
    let mut s = t - ts[k];
    if s < 0.0 {
        s += TAU;
    }
    let u = s / h;
    let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    let h10 = u * (1.0 - u) * (1.0 - u);
    let h01 = u * u * (3.0 - 2.0 * u);
    let h11 = u * u * (u - 1.0);
    h00 * vs[k] + h10 * h * slope(k) + h01 * vs[k1] + h11 * h * slope(k1)
}
