use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::inner::{disk_samples, inner_from_unitary};
use super::model::CyclicOperatorModel;
use super::oracle::matrix_oracle_unitary;
use super::perturb::perturb_unitary;
use crate::error::Result;
use crate::herglotz::BlaschkeProduct;
use crate::measures::CircleAtomicMeasure;

/// Position tolerance of the atom-by-atom comparisons.
pub const POSITION_TOLERANCE: f64 = 1e-9;
/// Mass tolerance of the atom-by-atom comparisons.
pub const MASS_TOLERANCE: f64 = 1e-8;

/// Clark measure `μ_α` of `θ`: atoms on `{θ = α}`, mass `1/|θ′(ξ)|` at each.
///
/// At a critical value two atoms would collide; that is reported as
/// [`crate::Error::CriticalValue`] and no masses are defined.
pub fn clark_measure(theta: &BlaschkeProduct, alpha: Complex64) -> Result<CircleAtomicMeasure> {
    let atoms = theta
        .level_set_angles(alpha)?
        .into_iter()
        .map(|s| (s, 1.0 / theta.phase_derivative(s)))
        .collect();
    CircleAtomicMeasure::new(atoms)
}

/// The family `M_θ = {μ_α : α ∈ 𝕋}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkFamily {
    theta: BlaschkeProduct,
}

impl ClarkFamily {
    pub fn new(theta: BlaschkeProduct) -> Self {
        Self { theta }
    }

    pub fn generator(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn measure(&self, alpha: Complex64) -> Result<CircleAtomicMeasure> {
        clark_measure(&self.theta, alpha)
    }

    /// `μ_α(𝕋) = Re((α + θ(0))/(α − θ(0)))`.
    pub fn expected_total_mass(&self, alpha: Complex64) -> f64 {
        let t0 = self.theta.at_origin();
        ((alpha + t0) / (alpha - t0)).re
    }

    /// Largest deviation of the Poisson integral of `μ_α` from
    /// `Re((α + θ)/(α − θ))` over the standard disk samples.
    pub fn poisson_defect(&self, alpha: Complex64) -> Result<f64> {
        let mu = self.measure(alpha)?;
        let mut worst = 0.0f64;
        for z in disk_samples(20) {
            let t = self.theta.eval(z)?;
            let want = ((alpha + t) / (alpha - t)).re;
            worst = worst.max((mu.poisson_integral(z)? - want).abs());
        }
        Ok(worst)
    }
}

pub(crate) fn wrapped(d: f64) -> f64 {
    let d = d.rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Atom-by-atom distance `(max angle deviation, max mass deviation)` between
/// two circle measures, matching atoms in angular order up to the best
/// cyclic shift (an atom near angle 0 may sort first in one measure and last
/// in the other). `None` when the atom counts differ.
pub fn circle_measure_distance(
    a: &CircleAtomicMeasure,
    b: &CircleAtomicMeasure,
) -> Option<(f64, f64)> {
    let (x, y) = (a.atoms(), b.atoms());
    if x.len() != y.len() {
        return None;
    }
    let n = x.len();
    if n == 0 {
        return Some((0.0, 0.0));
    }
    (0..n)
        .map(|shift| {
            let mut pos = 0.0f64;
            let mut mass = 0.0f64;
            for j in 0..n {
                let (pa, ma) = x[j];
                let (pb, mb) = y[(j + shift) % n];
                pos = pos.max(wrapped(pa - pb).abs());
                mass = mass.max((ma - mb).abs());
            }
            (pos, mass)
        })
        .min_by(|p, q| p.0.total_cmp(&q.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClarkCorrespondenceReport {
    pub samples: usize,
    /// Clark measure vs the perturbation formula.
    pub max_position_deviation: f64,
    pub max_mass_deviation: f64,
    /// Clark measure vs the dense unitary oracle.
    pub oracle_position_deviation: f64,
    pub oracle_mass_deviation: f64,
    pub max_total_mass_defect: f64,
    pub atom_count_mismatches: usize,
    pub pass: bool,
}

/// Compares, for each `α`, the Clark measure of `θ = inner_from_unitary`
/// with `perturb_unitary` and with the dense oracle.
pub fn verify_clark_correspondence(
    model: &CyclicOperatorModel,
    alphas: &[Complex64],
) -> Result<ClarkCorrespondenceReport> {
    let theta = inner_from_unitary(model)?;
    let mut report = ClarkCorrespondenceReport {
        samples: alphas.len(),
        max_position_deviation: 0.0,
        max_mass_deviation: 0.0,
        oracle_position_deviation: 0.0,
        oracle_mass_deviation: 0.0,
        max_total_mass_defect: 0.0,
        atom_count_mismatches: 0,
        pass: true,
    };
    for &alpha in alphas {
        let clark = clark_measure(&theta, alpha)?;
        let perturbed = perturb_unitary(model, alpha)?;
        let oracle = matrix_oracle_unitary(model, alpha)?;
        report.max_total_mass_defect = report
            .max_total_mass_defect
            .max((clark.total_mass() - 1.0).abs());
        match circle_measure_distance(&clark, &perturbed) {
            Some((p, m)) => {
                report.max_position_deviation = report.max_position_deviation.max(p);
                report.max_mass_deviation = report.max_mass_deviation.max(m);
            }
            None => report.atom_count_mismatches += 1,
        }
        match circle_measure_distance(&clark, &oracle) {
            Some((p, m)) => {
                report.oracle_position_deviation = report.oracle_position_deviation.max(p);
                report.oracle_mass_deviation = report.oracle_mass_deviation.max(m);
            }
            None => report.atom_count_mismatches += 1,
        }
    }
    report.pass = report.atom_count_mismatches == 0
        && report.max_position_deviation <= POSITION_TOLERANCE
        && report.oracle_position_deviation <= POSITION_TOLERANCE
        && report.max_mass_deviation <= MASS_TOLERANCE
        && report.oracle_mass_deviation <= MASS_TOLERANCE
        && report.max_total_mass_defect <= 1e-10;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::model::Kind;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn clark_examples() {
        let alpha = Complex64::from_polar(1.0, 2.0);
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let mu = clark_measure(&z, alpha).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.atoms()[0].0 - 2.0).abs() < 1e-15 && mu.atoms()[0].1 == 1.0);

        let z2 = BlaschkeProduct::monomial(2, ONE).unwrap();
        let mu = clark_measure(&z2, ONE).unwrap();
        assert_eq!(mu.atoms(), &[(0.0, 0.5), (PI, 0.5)]);
        let mu = clark_measure(&z2, Complex64::new(0.0, 1.0)).unwrap();
        assert!((mu.atoms()[0].0 - PI / 4.0).abs() < 1e-15);
        assert!((mu.atoms()[1].0 - 5.0 * PI / 4.0).abs() < 1e-15);
        assert!((mu.atoms()[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn poisson_identity_and_total_mass_for_nonzero_origin() {
        let theta = BlaschkeProduct::new(
            vec![Complex64::new(0.3, 0.4), Complex64::new(-0.5, 0.1)],
            Complex64::from_polar(1.0, 0.3),
        )
        .unwrap();
        let family = ClarkFamily::new(theta);
        for k in 0..8 {
            let alpha = Complex64::from_polar(1.0, 0.7 * k as f64);
            let mu = family.measure(alpha).unwrap();
            assert!((mu.total_mass() - family.expected_total_mass(alpha)).abs() < 1e-12);
            assert!(family.poisson_defect(alpha).unwrap() < 1e-9);
        }
    }

    #[test]
    fn cyclic_shift_matching() {
        let a = CircleAtomicMeasure::new(vec![(1e-13, 0.5), (3.0, 0.5)]).unwrap();
        let b = CircleAtomicMeasure::new(vec![(TAU - 1e-13, 0.5), (3.0, 0.5)]).unwrap();
        let (p, m) = circle_measure_distance(&a, &b).unwrap();
        assert!(p < 1e-12 && m == 0.0);
    }

    #[test]
    fn correspondence_on_small_models() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.0], vec![1.0]).unwrap();
        let r = verify_clark_correspondence(&m, &[Complex64::new(0.0, 1.0)]).unwrap();
        assert!(r.pass, "{r:?}");
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.5, 2.0, 4.0], vec![0.2, 0.5, 0.3])
            .unwrap();
        let alphas: Vec<Complex64> = (0..16)
            .map(|k| Complex64::from_polar(1.0, 0.4 * k as f64 + 0.1))
            .collect();
        let r = verify_clark_correspondence(&m, &alphas).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
