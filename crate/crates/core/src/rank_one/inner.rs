//! The operator ↔ inner-function dictionary.
//!
//! For a cyclic unitary with spectral measure `ν₁`, `Kν₁ = 1/(1 − θ)`
//! determines the inner function `θ = 1 − 1/Kν₁`, which vanishes at the
//! origin because `Kν₁(0) = ν₁(𝕋) = 1`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::model::{CyclicOperatorModel, Kind};
use crate::error::{Error, Result};
use crate::herglotz::{cayley_transfer, BlaschkeProduct, HalfPlaneInner, HerglotzRational};
use crate::linalg::{self, CMatrix};

/// Tolerance of the `Kν₁·(1 − θ) = 1` verification.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

const POLISH_ITERATIONS: usize = 50;
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `G(z) = Σ wⱼ/(ξⱼ − z)` and its derivative.
fn g_and_derivative(points: &[Complex64], weights: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut g = Complex64::new(0.0, 0.0);
    let mut dg = Complex64::new(0.0, 0.0);
    for (&xi, &w) in points.iter().zip(weights) {
        let inv = ONE / (xi - z);
        g += inv * w;
        dg += inv * inv * w;
    }
    (g, dg)
}

/// Sample points `|z| ≤ 0.9` used to verify disk identities.
pub fn disk_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let r = 0.9 * (k as f64 + 1.0) / count as f64;
            Complex64::from_polar(r, 2.399_963_229_728_653 * k as f64)
        })
        .collect()
}

/// `θ = 1 − 1/Kν₁` for a circle model, as a Blaschke product of degree `N`
/// with `θ(0) = 0`.
///
/// Writing `Kν₁ − 1 = z·G(z)` with `G = vᵀ(D − z)⁻¹v`, the zeros of `θ` are
/// the origin and the zeros of `G`, which are the eigenvalues of `D`
/// compressed to `v^⊥`. Those are refined by Newton on `G`; the front
/// constant is read off at boundary points between the atoms.
pub fn inner_from_unitary(model: &CyclicOperatorModel) -> Result<BlaschkeProduct> {
    if model.kind() != Kind::Circle {
        return Err(Error::InvalidModel(
            "inner_from_unitary needs a circle model".into(),
        ));
    }
    let nu = model.circle_measure()?;
    let points = nu.points();
    let weights = nu.masses();
    let n = points.len();
    let v: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();

    let mut zeros = vec![Complex64::new(0.0, 0.0)];
    if n > 1 {
        // Householder reflector with H v = −e₀; its trailing columns span v^⊥.
        let mut u = v.clone();
        u[0] += 1.0;
        let uu: f64 = u.iter().map(|x| x * x).sum();
        let h = DMatrix::from_fn(n, n, |r, c| {
            let delta = if r == c { 1.0 } else { 0.0 };
            delta - 2.0 * u[r] * u[c] / uu
        });
        let compressed = CMatrix::from_fn(n - 1, n - 1, |r, c| {
            (0..n)
                .map(|k| points[k] * h[(k, r + 1)] * h[(k, c + 1)])
                .sum::<Complex64>()
        });
        for z0 in linalg::general_eigenvalues(compressed)? {
            let a = polish_zero(&points, &weights, z0)?;
            if !(a.norm() < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "zero {a} of θ is not inside the disk"
                )));
            }
            zeros.push(a);
        }
    }

    // Phase of c from the boundary values θ = 1 − 1/Kν₁ between atoms.
    let unit = BlaschkeProduct::new(zeros.clone(), ONE)?;
    let angles = nu.angles();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let next = if k + 1 < n {
            angles[k + 1]
        } else {
            angles[0] + TAU
        };
        let xi = Complex64::from_polar(1.0, 0.5 * (angles[k] + next));
        let kv: Complex64 = points
            .iter()
            .zip(&weights)
            .map(|(&p, &w)| w / (ONE - p.conj() * xi))
            .sum();
        let theta = ONE - ONE / kv;
        acc += theta / unit.eval(xi)?;
    }
    let c = acc / acc.norm();
    let theta = BlaschkeProduct::new(zeros, c)?;

    for z in disk_samples(20) {
        let k = nu.cauchy_transform(z)?;
        let defect = (k * (ONE - theta.eval(z)?) - ONE).norm();
        if defect > IDENTITY_TOLERANCE {
            return Err(Error::InvalidModel(format!(
                "Kν₁(1 − θ) = 1 fails at {z} by {defect:e}"
            )));
        }
    }
    Ok(theta)
}

fn polish_zero(points: &[Complex64], weights: &[f64], mut z: Complex64) -> Result<Complex64> {
    let mut residual = f64::INFINITY;
    for _ in 0..POLISH_ITERATIONS {
        let (g, dg) = g_and_derivative(points, weights, z);
        residual = g.norm();
        let step = g / dg;
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON {
            return Ok(z);
        }
    }
    if residual <= 1e-12 {
        return Ok(z);
    }
    Err(Error::RootPolish {
        near: z,
        iterations: POLISH_ITERATIONS,
        residual,
    })
}

/// Half-plane inner function `(1 + iKμ)/(1 − iKμ)` of a line model.
pub fn inner_from_selfadjoint(model: &CyclicOperatorModel) -> Result<HalfPlaneInner> {
    let mu = model.line_measure()?;
    cayley_transfer(&HerglotzRational::from_line_measure(&mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::relabel;
    use std::f64::consts::PI;

    #[test]
    fn dirac_gives_identity_map() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.0], vec![1.0]).unwrap();
        let theta = inner_from_unitary(&m).unwrap();
        assert_eq!(theta.degree(), 1);
        let z = Complex64::new(0.3, -0.2);
        assert!((theta.eval(z).unwrap() - z).norm() < 1e-15);
    }

    #[test]
    fn antipodal_pair_gives_z_squared() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.0, PI], vec![0.5, 0.5]).unwrap();
        let theta = inner_from_unitary(&m).unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert!((theta.eval(z).unwrap() - z * z).norm() < 1e-14);
        assert_eq!(theta.at_origin(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn general_model_satisfies_identity() {
        let m = CyclicOperatorModel::new(
            Kind::Circle,
            vec![0.1, 1.0, 2.5, 4.0, 5.9],
            vec![0.1, 0.3, 0.2, 0.15, 0.25],
        )
        .unwrap();
        let theta = inner_from_unitary(&m).unwrap();
        assert_eq!(theta.degree(), 5);
        // the level set at α = 1 is the support of ν₁
        let l = theta.level_set_angles(ONE).unwrap();
        for (a, b) in l.iter().zip(m.sites()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn selfadjoint_dirac() {
        let m = CyclicOperatorModel::new(Kind::Line, vec![0.0], vec![1.0]).unwrap();
        let theta = inner_from_selfadjoint(&m).unwrap();
        assert!(theta.eval(Complex64::new(0.0, 2.0)).unwrap().norm() < 1.0);
        let xs = theta.level_set_real(relabel(3.0)).unwrap();
        assert!((xs[0] - 3.0).abs() < 1e-12);
    }
}
