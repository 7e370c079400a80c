//! Verification harnesses over analytic curves: disintegration along the
//! curve, Simon–Wolff sums on each axis, and null-set avoidance.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::curve::AnalyticCurve;
use super::family::RankNPerturbationFamily;
use super::two::RankTwoSetup;
use crate::error::{Error, Result};
use crate::measures::{Arc, CircleAtomicMeasure};
use crate::quadrature::{
    gauss_kronrod, periodic_trapezoid_complex, GaussKronrodConfig, TrapezoidConfig,
};
use crate::rank_one::clark::wrapped;
use crate::rank_one::oracle::spectral_measure_of_vector;
use crate::rank_one::simon_wolff::{simon_wolff_classify_circle, Finiteness, SimonWolffProbe};

/// Atoms lighter than this are not counted as atoms.
pub const MIN_ATOM_MASS: f64 = 1e-12;
/// Distance to `E` that counts as a collision.
pub const COLLISION_TOLERANCE: f64 = 1e-9;

const INITIAL_SAMPLES: usize = 1024;
const MAX_SAMPLES: usize = 1 << 16;

/// Spectral measure of the last vector for `U_{γ(ξ)}`.
fn curve_measure(
    family: &RankNPerturbationFamily,
    curve: &AnalyticCurve,
    s: f64,
) -> Result<CircleAtomicMeasure> {
    if curve.len() != family.rank() {
        return Err(Error::Dimension(format!(
            "curve in 𝕋^{} for a rank-{} family",
            curve.len(),
            family.rank()
        )));
    }
    let point = curve.sample(Complex64::from_polar(1.0, s))?;
    let u = family.recursive_unitary(&point)?;
    spectral_measure_of_vector(&u, family.vectors().last().expect("nonempty"))
}

fn heavy_atoms(mu: &CircleAtomicMeasure) -> Vec<(f64, f64)> {
    mu.atoms()
        .iter()
        .copied()
        .filter(|a| a.1 > MIN_ATOM_MASS)
        .collect()
}

/// Cyclic shift aligning two angle-sorted atom lists.
fn best_shift(a: &[(f64, f64)], b: &[(f64, f64)]) -> Option<usize> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let n = a.len();
    (0..n).min_by(|&p, &q| {
        let d = |s: usize| {
            (0..n)
                .map(|j| wrapped(a[j].0 - b[(j + s) % n].0).abs())
                .fold(0.0, f64::max)
        };
        d(p).total_cmp(&d(q))
    })
}

/// `∫₀¹ w(t)·1[a(t) ∈ arcs] dt` for `a`, `w` linear in `t`.
fn segment_integral(a0: f64, w0: f64, d: f64, w1: f64, arcs: &[Arc]) -> f64 {
    let linear = |t0: f64, t1: f64| w0 * (t1 - t0) + (w1 - w0) * (t1 * t1 - t0 * t0) / 2.0;
    let mut total = 0.0;
    for arc in arcs {
        if arc.length >= TAU {
            total += linear(0.0, 1.0);
            continue;
        }
        if d == 0.0 {
            if arc.contains(a0) {
                total += linear(0.0, 1.0);
            }
            continue;
        }
        let (lo, hi) = if d > 0.0 { (a0, a0 + d) } else { (a0 + d, a0) };
        let kmin = ((lo - arc.end()) / TAU).floor() as i64;
        let kmax = ((hi - arc.start) / TAU).ceil() as i64;
        for k in kmin..=kmax {
            let s = arc.start + TAU * k as f64;
            let (x0, x1) = (s.max(lo), (s + arc.length).min(hi));
            if x1 <= x0 {
                continue;
            }
            let (t0, t1) = ((x0 - a0) / d, (x1 - a0) / d);
            let (t0, t1) = (t0.min(t1).clamp(0.0, 1.0), t0.max(t1).clamp(0.0, 1.0));
            total += linear(t0, t1);
        }
    }
    total
}

/// `∫ ν_{γ(ξ)}(B) dm(ξ)` from samples on an equispaced grid, following each
/// atom linearly between neighbouring samples. Returns the estimate and the
/// number of segments whose atoms could not be matched.
fn track_integral(samples: &[Vec<(f64, f64)>], arcs: &[Arc]) -> (f64, usize) {
    let m = samples.len();
    let mut total = 0.0;
    let mut unmatched = 0;
    for k in 0..m {
        let (a, b) = (&samples[k], &samples[(k + 1) % m]);
        match best_shift(a, b) {
            Some(shift) => {
                for (j, &(a0, w0)) in a.iter().enumerate() {
                    let (a1, w1) = b[(j + shift) % b.len()];
                    total += segment_integral(a0, w0, wrapped(a1 - a0), w1, arcs);
                }
            }
            None => {
                unmatched += 1;
                let mass = |s: &[(f64, f64)]| -> f64 {
                    s.iter()
                        .filter(|p| arcs.iter().any(|arc| arc.contains(p.0)))
                        .map(|p| p.1)
                        .sum()
                };
                total += 0.5 * (mass(a) + mass(b));
            }
        }
    }
    (total / m as f64, unmatched)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveDisintegrationReport {
    /// `∫ ν_{γ(ξ)}(B) dm(ξ)` from the dense oracle.
    pub left: f64,
    pub left_error: f64,
    /// `∫_B (2 Re φ − 1) dm`.
    pub right: f64,
    pub right_error: f64,
    pub samples: usize,
    /// Samples where `ν_{γ(ξ)}` did not have exactly `N` atoms.
    pub atom_count_failures: usize,
    pub unmatched_segments: usize,
}

impl CurveDisintegrationReport {
    pub fn difference(&self) -> f64 {
        (self.left - self.right).abs()
    }
}

/// Compares both sides of the disintegration of `∫ν_{γ(ξ)} dm(ξ)`, whose
/// density is `2 Re φ − φ(0)` with `φ(0) = 1`.
///
/// The left side samples the oracle on `M` equispaced `ξ`, doubling `M`
/// until two successive estimates agree to `tolerance`; the reported error
/// is that difference. The right side is adaptive Gauss–Kronrod over each
/// arc.
pub fn curve_disintegration_check(
    setup: &RankTwoSetup,
    curve: &AnalyticCurve,
    arcs: &[Arc],
    tolerance: f64,
) -> Result<CurveDisintegrationReport> {
    let family = setup.family();
    let n = family.dim();
    let sample = |s: f64| curve_measure(family, curve, s).map(|mu| heavy_atoms(&mu));
    let mut m = INITIAL_SAMPLES;
    let mut samples: Vec<Vec<(f64, f64)>> = (0..m)
        .into_par_iter()
        .map(|k| sample(TAU * k as f64 / m as f64))
        .collect::<Result<_>>()?;
    let (mut left, _) = track_integral(&samples, arcs);
    let mut unmatched;
    let left_error = loop {
        if 2 * m > MAX_SAMPLES {
            return Err(Error::Quadrature {
                estimate: left,
                error: f64::INFINITY,
                evaluations: m,
            });
        }
        let odd: Vec<Vec<(f64, f64)>> = (0..m)
            .into_par_iter()
            .map(|k| sample(TAU * (k as f64 + 0.5) / m as f64))
            .collect::<Result<_>>()?;
        samples = samples
            .into_iter()
            .zip(odd)
            .flat_map(|(e, o)| [e, o])
            .collect();
        m *= 2;
        let (next, u) = track_integral(&samples, arcs);
        let err = (next - left).abs();
        left = next;
        unmatched = u;
        if err <= tolerance {
            break err;
        }
    };
    let atom_count_failures = samples.iter().filter(|s| s.len() != n).count();

    let config = GaussKronrodConfig {
        tolerance: tolerance * 1e-3,
        ..GaussKronrodConfig::default()
    };
    let mut right = 0.0;
    let mut right_error = 0.0;
    let mut failure = None;
    for arc in arcs {
        let est = gauss_kronrod(
            |s| match setup.phi_boundary(curve, s) {
                Ok(v) => 2.0 * v.re - 1.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            arc.start,
            arc.end(),
            config,
        )?;
        right += est.value / TAU;
        right_error += est.error / TAU;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(CurveDisintegrationReport {
        left,
        left_error,
        right,
        right_error,
        samples: m,
        atom_count_failures,
        unmatched_segments: unmatched,
    })
}

/// `∫ Kν_{γ(ξ)}(z) dm(ξ)` with the oracle measures, by the periodic
/// trapezoid rule; compare with `φ(z)`.
pub fn curve_mean_transform(
    setup: &RankTwoSetup,
    curve: &AnalyticCurve,
    z: Complex64,
    config: TrapezoidConfig,
) -> Result<(Complex64, f64)> {
    let mut failure = None;
    let est = periodic_trapezoid_complex(
        |s| match curve_measure(setup.family(), curve, s).and_then(|mu| mu.cauchy_transform(z)) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        config,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((est.value, est.error))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisReport {
    pub index: usize,
    pub probes: Vec<f64>,
    pub classes: Vec<Finiteness>,
    /// Probes where the classification disagrees with membership in the
    /// spectrum of the base operator.
    pub mismatches: usize,
}

/// For each `k`, the Simon–Wolff sums of the spectral measure of `φ_k` for
/// the base operator at the probe angles. A probe should be infinite
/// exactly when it is an eigenvalue of the base.
pub fn theorem4_axis_criterion(
    family: &RankNPerturbationFamily,
    probes: &[f64],
) -> Result<Vec<AxisReport>> {
    let sites: Vec<f64> = family.base().sites().to_vec();
    let is_site = |s: f64| sites.iter().any(|&a| wrapped(a - s).abs() <= 1e-12);
    family
        .vectors()
        .iter()
        .enumerate()
        .map(|(index, phi)| {
            let mu = spectral_measure_of_vector(family.base_matrix(), phi)?;
            let classified: Vec<SimonWolffProbe> = simon_wolff_classify_circle(&mu, probes)?;
            let classes: Vec<Finiteness> = classified.iter().map(|p| p.class()).collect();
            let mismatches = probes
                .iter()
                .zip(&classes)
                .filter(|(&s, &c)| (c == Finiteness::Infinite) != is_site(s))
                .count();
            Ok(AxisReport {
                index,
                probes: probes.to_vec(),
                classes,
                mismatches,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collision {
    pub sample: usize,
    pub xi: f64,
    pub point: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSetReport {
    pub samples: usize,
    pub collisions: Vec<Collision>,
}

/// For each sampled `ξ`, whether an atom of the spectral measure of the last
/// vector for `U_{γ(ξ)}` lies within `1e−9` of a point of `E`.
pub fn theorem9_nullset_check(
    family: &RankNPerturbationFamily,
    curve: &AnalyticCurve,
    set: &[f64],
    xis: &[f64],
) -> Result<NullSetReport> {
    let per_sample: Vec<Vec<Collision>> = xis
        .par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mu = curve_measure(family, curve, xi)?;
            let mut hits = Vec::new();
            for &e in set {
                let distance = mu
                    .atoms()
                    .iter()
                    .map(|a| wrapped(a.0 - e).abs())
                    .fold(f64::INFINITY, f64::min);
                if distance <= COLLISION_TOLERANCE {
                    hits.push(Collision {
                        sample: i,
                        xi,
                        point: e,
                        distance,
                    });
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok(NullSetReport {
        samples: xis.len(),
        collisions: per_sample.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::BlaschkeProduct;
    use crate::linalg;
    use crate::rank_one::model::{CyclicOperatorModel, Kind};
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    fn z_squared() -> RankTwoSetup {
        RankTwoSetup::new(BlaschkeProduct::monomial(2, ONE).unwrap(), vec![ZERO, ONE]).unwrap()
    }

    #[test]
    fn segment_integrals() {
        let arc = [Arc::new(0.0, 1.0).unwrap()];
        assert!((segment_integral(0.5, 1.0, 0.0, 1.0, &arc) - 1.0).abs() < 1e-15);
        // half the path lies in the arc
        assert!((segment_integral(0.5, 1.0, 1.0, 1.0, &arc) - 0.5).abs() < 1e-15);
        // wrapping backwards through zero
        assert!((segment_integral(0.2, 2.0, -0.4, 2.0, &arc) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_curve_gives_arc_length() {
        let s = z_squared();
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let g = AnalyticCurve::new(vec![z.clone(), z]).unwrap();
        let arc = [Arc::new(0.4, 1.3).unwrap()];
        let r = curve_disintegration_check(&s, &g, &arc, 1e-6).unwrap();
        assert!((r.right - 1.3 / TAU).abs() < 1e-10);
        assert!(r.difference() < 1e-4, "{r:?}");
        assert_eq!(r.atom_count_failures, 0);
    }

    #[test]
    fn nontrivial_curve_and_mean_value() {
        let s = z_squared();
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let half = BlaschkeProduct::new(vec![Complex64::new(0.5, 0.0)], ONE).unwrap();
        let g = AnalyticCurve::new(vec![z, half]).unwrap();
        let r = curve_disintegration_check(&s, &g, &[Arc::new(0.0, PI).unwrap()], 1e-6).unwrap();
        assert!(r.difference() < 1e-4, "{r:?}");
        let full = curve_disintegration_check(&s, &g, &[Arc::full()], 1e-6).unwrap();
        assert!(
            (full.right - 1.0).abs() < 1e-9 && (full.left - 1.0).abs() < 1e-9,
            "{full:?}"
        );

        let (mean, _) = curve_mean_transform(&s, &g, ZERO, TrapezoidConfig::default()).unwrap();
        assert!((mean - s.phi_density(&g, ZERO).unwrap()).norm() < 1e-6);
        let p = Complex64::new(0.3, -0.2);
        let (mean, _) = curve_mean_transform(&s, &g, p, TrapezoidConfig::default()).unwrap();
        assert!((mean - s.phi_density(&g, p).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn axis_criterion() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.5, 2.5], vec![0.5, 0.5]).unwrap();
        let v2 = linalg::real_to_complex(&[0.6, 0.8]);
        let f =
            RankNPerturbationFamily::new(m.clone(), vec![m.cyclic_vector_complex(), v2]).unwrap();
        let r = theorem4_axis_criterion(&f, &[0.0, 0.5, 1.0, 2.5, 4.0]).unwrap();
        for axis in &r {
            assert_eq!(axis.mismatches, 0);
            assert_eq!(axis.classes[1], Finiteness::Infinite);
            assert_eq!(axis.classes[0], Finiteness::Finite);
        }
    }

    #[test]
    fn null_set_probe() {
        let s = z_squared();
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let g = AnalyticCurve::new(vec![z.clone(), z]).unwrap();
        let xis: Vec<f64> = (0..64).map(|k| 0.1 + TAU * k as f64 / 64.0).collect();
        assert!(theorem9_nullset_check(s.family(), &g, &[], &xis)
            .unwrap()
            .collisions
            .is_empty());
        assert!(theorem9_nullset_check(s.family(), &g, &[0.0], &xis)
            .unwrap()
            .collisions
            .is_empty());

        let half = BlaschkeProduct::new(vec![Complex64::new(0.5, 0.2)], ONE).unwrap();
        let g = AnalyticCurve::new(vec![BlaschkeProduct::monomial(1, ONE).unwrap(), half]).unwrap();
        let mu = curve_measure(s.family(), &g, xis[17]).unwrap();
        let e = mu.atoms()[0].0;
        let r = theorem9_nullset_check(s.family(), &g, &[e], &xis).unwrap();
        assert_eq!(r.collisions.len(), 1);
        assert_eq!(r.collisions[0].sample, 17);
    }
}
