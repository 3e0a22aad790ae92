//! Singular points of singular solutions: reflection, detection and the
//! sign-pattern classification along the x-axis.

use serde::Serialize;

use super::zeros::{find_zeros_with, ZeroRecord};
use super::AnalysisError;
use crate::calculus::{singular_threshold, PairField};

/// Relative tolerance of the reflection-symmetry test.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    Increasing,
    Decreasing,
    Maximum,
    Minimum,
}

impl SingularityKind {
    /// Parity the multiplicity must have: odd for increasing/decreasing,
    /// even for maximum/minimum.
    pub fn requires_odd(self) -> bool {
        matches!(self, SingularityKind::Increasing | SingularityKind::Decreasing)
    }

    pub fn parity_ok(self, k: i32) -> bool {
        (k % 2 != 0) == self.requires_odd()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularityRecord {
    pub b: f64,
    pub multiplicity: i32,
    pub kind: SingularityKind,
    /// Half-width of the x-axis interval used for the sign test.
    pub probe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Singularities {
    /// `u` even and `v` odd in `y`: the whole x-axis is singular.
    NonisolatedLine { v_axis_sup: f64 },
    Isolated { records: Vec<SingularityRecord> },
}

/// `u′(x, y) = u(x, −y)`, `v′(x, y) = −v(x, −y)`.
pub fn reflect_solution(p: &PairField) -> PairField {
    PairField::new(p.u.reflected(1.0), p.v.reflected(-1.0), p.a)
}

fn is_reflection_symmetric(p: &PairField) -> bool {
    let r = reflect_solution(p);
    let scale = 1.0 + p.u.sup_norm().max(p.v.sup_norm());
    p.u.sub(&r.u).sup_norm() <= SYMMETRY_TOL * scale && p.v.sub(&r.v).sup_norm() <= SYMMETRY_TOL * scale
}

/// Singularities of a singular solution at `a = a_floor`.
pub fn find_singularities(p: &PairField, a_floor: f64) -> Result<Singularities, AnalysisError> {
    let grid = p.grid();
    if is_reflection_symmetric(p) {
        let v_axis_sup = grid
            .axis_nodes()
            .iter()
            .fold(0.0, |m: f64, &k| m.max(p.v.values()[k].abs()));
        return Ok(Singularities::NonisolatedLine { v_axis_sup });
    }
    let h = grid.h();
    let search = find_zeros_with(p, &reflect_solution(p), a_floor)?;
    let mut records = Vec::new();
    for z in search.zeros.iter().filter(|z| z.c.abs() <= h) {
        let probe = default_probe(z, h);
        let kind = classify_singularity_type(p, z.b, probe, a_floor)?;
        records.push(SingularityRecord {
            b: z.b,
            multiplicity: z.multiplicity,
            kind,
            probe,
        });
    }
    Ok(Singularities::Isolated { records })
}

fn default_probe(z: &ZeroRecord, h: f64) -> f64 {
    z.radius.max(8.0 * h)
}

/// Sign pattern of `v(x, 0)` on `h ≤ |x − b| ≤ ε`. Values below the
/// singular threshold carry no sign; on mixed signs the interval is halved
/// down to `2h`.
pub fn classify_singularity_type(
    p: &PairField,
    b: f64,
    eps: f64,
    a_floor: f64,
) -> Result<SingularityKind, AnalysisError> {
    let grid = p.grid();
    let h = grid.h();
    let zero = singular_threshold(h, a_floor);
    let mut probe = eps;
    loop {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &k in grid.axis_nodes() {
            let x = grid.nodes()[k].x;
            let d = x - b;
            if d.abs() < h || d.abs() > probe {
                continue;
            }
            let v = p.v.values()[k];
            if v.abs() < zero {
                continue;
            }
            if d < 0.0 {
                left.push(v > 0.0);
            } else {
                right.push(v > 0.0);
            }
        }
        let side = |s: &[bool]| -> Option<Option<bool>> {
            if s.is_empty() {
                None
            } else if s.iter().all(|&p| p == s[0]) {
                Some(Some(s[0]))
            } else {
                Some(None)
            }
        };
        match (side(&left), side(&right)) {
            (Some(Some(l)), Some(Some(r))) => {
                return Ok(match (l, r) {
                    (false, true) => SingularityKind::Increasing,
                    (true, false) => SingularityKind::Decreasing,
                    (false, false) => SingularityKind::Maximum,
                    (true, true) => SingularityKind::Minimum,
                })
            }
            (Some(None), _) | (_, Some(None)) if probe * 0.5 >= 2.0 * h => probe *= 0.5,
            _ => return Err(AnalysisError::AmbiguousSign { b, probe }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use crate::grid::build_grid;

    fn disc(h: f64) -> std::sync::Arc<crate::grid::Grid> {
        build_grid(&make_domain(&DomainParams::unit_disc()).unwrap(), h).unwrap()
    }

    #[test]
    fn reflection_is_an_involution_and_fixes_symmetric_pairs() {
        let g = disc(0.05);
        let p = PairField::from_fn(&g, 0.0, |x, y| (x * y + y * y, x - y * x * x + 0.3 * y));
        let rr = reflect_solution(&reflect_solution(&p));
        assert_eq!(rr.u.values(), p.u.values());
        assert_eq!(rr.v.values(), p.v.values());

        let twosheet = PairField::from_fn(&g, 0.0, |x, y| (y.abs() - 0.5 * (2.0 * x).cosh(), -y * (2.0 * x).sinh()));
        let r = reflect_solution(&twosheet);
        assert!(r.u.sub(&twosheet.u).sup_norm() < 1e-15);
        assert!(r.v.sub(&twosheet.v).sup_norm() < 1e-15);
        assert!(matches!(
            find_singularities(&twosheet, 1e-4).unwrap(),
            Singularities::NonisolatedLine { .. }
        ));
    }

    #[test]
    fn sign_patterns() {
        let g = disc(0.02);
        let inc = PairField::from_fn(&g, 0.0, |x, _| (0.0, x - 0.1));
        assert_eq!(classify_singularity_type(&inc, 0.1, 0.3, 1e-4).unwrap(), SingularityKind::Increasing);
        let max = PairField::from_fn(&g, 0.0, |x, _| (0.0, -(x - 0.1) * (x - 0.1)));
        assert_eq!(classify_singularity_type(&max, 0.1, 0.3, 1e-4).unwrap(), SingularityKind::Maximum);
        let dec = PairField::from_fn(&g, 0.0, |x, _| (0.0, -(x + 0.2).powi(3)));
        assert_eq!(classify_singularity_type(&dec, -0.2, 0.4, 1e-4).unwrap(), SingularityKind::Decreasing);
        let flat = PairField::from_fn(&g, 0.0, |_, _| (0.0, 0.0));
        assert!(matches!(
            classify_singularity_type(&flat, 0.0, 0.3, 1e-4),
            Err(AnalysisError::AmbiguousSign { .. })
        ));
    }

    #[test]
    fn parity_rules() {
        assert!(SingularityKind::Increasing.parity_ok(1));
        assert!(!SingularityKind::Decreasing.parity_ok(2));
        assert!(SingularityKind::Maximum.parity_ok(2));
        assert!(!SingularityKind::Minimum.parity_ok(3));
    }
}
