//! Counting local extrema of boundary data and checking the resulting
//! bounds on total multiplicity.

use std::f64::consts::TAU;

use serde::Serialize;

use super::singular::SingularityRecord;
use super::AnalysisError;
use crate::boundary::BoundaryFunction;
use crate::domain::DomainSpec;

pub const MIN_EXTREMA_SAMPLES: usize = 256;
/// Slopes below this fraction of the oscillation count as flat.
const FLAT_SLOPE: f64 = 1e-9;

/// Number `l` of local maxima (equivalently minima) of `ψ` around the
/// boundary, from `n` equally spaced samples in `θ`.
pub fn count_boundary_extrema(
    psi: &BoundaryFunction,
    domain: &DomainSpec,
    n: usize,
) -> Result<usize, AnalysisError> {
    if n < MIN_EXTREMA_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            min: MIN_EXTREMA_SAMPLES,
            got: n,
        });
    }
    let values: Vec<f64> = (0..n)
        .map(|k| psi.eval(domain, TAU * k as f64 / n as f64))
        .collect();
    count_cyclic_extrema(&values)
}

/// `l` for cyclic samples: strict sign alternations of the forward
/// differences, with flat stretches merged into their neighbours, halved.
pub fn count_cyclic_extrema(values: &[f64]) -> Result<usize, AnalysisError> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + lo.abs().max(hi.abs());
    if !(hi - lo > 1e-12 * scale) {
        return Err(AnalysisError::FlatBoundary);
    }
    let n = values.len();
    let signs: Vec<bool> = (0..n)
        .map(|k| values[(k + 1) % n] - values[k])
        .filter(|d| d.abs() > FLAT_SLOPE * (hi - lo))
        .map(|d| d > 0.0)
        .collect();
    let m = signs.len();
    let alternations = (0..m).filter(|&k| signs[k] != signs[(k + 1) % m]).count();
    Ok(alternations / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub total_multiplicity: i32,
    pub l: usize,
    /// `Σk ≤ l − 1`.
    pub bound_holds: bool,
    /// Every multiplicity is at least 1.
    pub positive: bool,
    /// Type parity agrees with multiplicity on every singularity record.
    pub parity_ok: bool,
    pub passed: bool,
}

/// Checks `Σk ≤ l − 1` and positivity for bare multiplicities.
pub fn check_bounds(multiplicities: &[i32], l: usize) -> BoundsReport {
    let total: i32 = multiplicities.iter().sum();
    let bound_holds = i64::from(total) < l as i64;
    let positive = multiplicities.iter().all(|&k| k >= 1);
    BoundsReport {
        total_multiplicity: total,
        l,
        bound_holds,
        positive,
        parity_ok: true,
        passed: bound_holds && positive,
    }
}

/// As [`check_bounds`], additionally checking type parity.
pub fn check_singularity_bounds(records: &[SingularityRecord], l: usize) -> BoundsReport {
    let ks: Vec<i32> = records.iter().map(|r| r.multiplicity).collect();
    let mut report = check_bounds(&ks, l);
    report.parity_ok = records.iter().all(|r| r.kind.parity_ok(r.multiplicity));
    report.passed = report.passed && report.parity_ok;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_domain, DomainParams};
    use proptest::prelude::*;

    fn disc() -> DomainSpec {
        make_domain(&DomainParams::unit_disc()).unwrap()
    }

    #[test]
    fn trig_extrema() {
        let d = disc();
        let cos1 = BoundaryFunction::trig(vec![0.0, 1.0], vec![]);
        assert_eq!(count_boundary_extrema(&cos1, &d, 256).unwrap(), 1);
        let cos3 = BoundaryFunction::trig(vec![0.0, 0.0, 0.0, 1.0], vec![]);
        assert_eq!(count_boundary_extrema(&cos3, &d, 256).unwrap(), 3);
        assert!(matches!(
            count_boundary_extrema(&cos3, &d, 100),
            Err(AnalysisError::TooFewSamples { .. })
        ));
        assert_eq!(
            count_boundary_extrema(&BoundaryFunction::zero(), &d, 256).unwrap_err(),
            AnalysisError::FlatBoundary
        );
    }

    #[test]
    fn affine_difference_on_ellipse_has_one_maximum() {
        let e = make_domain(&DomainParams::Ellipse { semi_axes: [1.5, 0.7] }).unwrap();
        let psi = BoundaryFunction::zero().with_affine(0.4, -0.9);
        assert_eq!(count_boundary_extrema(&psi, &e, 512).unwrap(), 1);
    }

    #[test]
    fn plateaus_merge() {
        let mut v = vec![0.0; 300];
        for (k, x) in v.iter_mut().enumerate().take(100) {
            *x = (std::f64::consts::PI * k as f64 / 99.0).sin();
        }
        assert_eq!(count_cyclic_extrema(&v).unwrap(), 1);
    }

    #[test]
    fn bound_reports() {
        assert!(check_bounds(&[], 1).passed);
        assert!(!check_bounds(&[1], 1).passed);
        assert!(check_bounds(&[2], 3).passed);
        assert!(!check_bounds(&[3], 3).passed);
        assert!(!check_bounds(&[0], 5).positive);
    }

    proptest! {
        #[test]
        fn pure_harmonic_has_j_extrema(j in 1usize..=8, phase in 0.0..TAU, amp in 0.1..10.0f64) {
            let mut cos = vec![0.0; j + 1];
            let mut sin = vec![0.0; j + 1];
            cos[j] = amp * phase.cos();
            sin[j] = amp * phase.sin();
            let psi = BoundaryFunction::trig(cos, sin);
            prop_assert_eq!(count_boundary_extrema(&psi, &disc(), 512).unwrap(), j);
        }
    }
}
