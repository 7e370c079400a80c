//! Conformal transfer between the upper half-plane and the disk.
//!
//! `ω(z) = (z − i)/(z + i)` maps `ℂ₊` onto `𝔻`. A Herglotz function `J` on
//! `ℂ₊` becomes the inner function `θ = (1 + iJ)/(1 − iJ)`; this sign is the
//! one for which `|θ| < 1` wherever `Im J > 0`. Under it the level set
//! `{J = −1/λ}` is `{θ = ω(λ)}`.

use num_complex::Complex64;

use super::blaschke::BlaschkeProduct;
use super::poly::Poly;
use super::rational::HerglotzRational;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const POLISH_ITERATIONS: usize = 50;

pub fn omega(z: Complex64) -> Result<Complex64> {
    let d = z + I;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(z));
    }
    Ok((z - I) / d)
}

pub fn omega_inv(w: Complex64) -> Result<Complex64> {
    let d = ONE - w;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(w));
    }
    Ok(I * (ONE + w) / d)
}

/// The disk label `α(λ) = ω(λ)` of the level set `{J = −1/λ}`.
pub fn relabel(lambda: f64) -> Complex64 {
    let l = Complex64::new(lambda, 0.0);
    (l - I) / (l + I)
}

/// Inner function on the upper half-plane, `θ_H = B ∘ ω` with `B` a finite
/// Blaschke product on the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneInner {
    disk: BlaschkeProduct,
}

impl HalfPlaneInner {
    pub fn new(disk: BlaschkeProduct) -> Self {
        Self { disk }
    }

    pub fn disk(&self) -> &BlaschkeProduct {
        &self.disk
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.disk.eval(omega(z)?)
    }

    /// Real solutions of `θ_H(x) = α`, ascending. The boundary point `ξ = 1`
    /// corresponds to `x = ∞` and is dropped.
    pub fn level_set_real(&self, alpha: Complex64) -> Result<Vec<f64>> {
        let mut xs = Vec::new();
        for xi in self.disk.level_set(alpha)? {
            if (xi - ONE).norm() < 1e-14 {
                continue;
            }
            xs.push(omega_inv(xi)?.re);
        }
        xs.sort_by(f64::total_cmp);
        Ok(xs)
    }
}

/// `θ_H = (1 + iJ)/(1 − iJ)` for the Cauchy transform `J` of a line measure.
///
/// The zeros of `θ_H` in `ℂ₊` solve `J = i`; for `J = φᵀ(D − z)⁻¹φ` they are
/// the eigenvalues of `D + iφφᵀ`, refined by Newton on `J − i`.
pub fn cayley_transfer(j: &HerglotzRational) -> Result<HalfPlaneInner> {
    let ji = j.eval(I)?;
    if !(ji.im > 0.0) {
        return Err(Error::NotHerglotz(format!("Im J(i) = {} ≤ 0", ji.im)));
    }
    let atoms = super::secular::line_atoms_of(j)?;
    let n = atoms.len();
    let mut m = crate::linalg::CMatrix::zeros(n, n);
    for (r, &(tr, mr)) in atoms.iter().enumerate() {
        m[(r, r)] += Complex64::new(tr, 0.0);
        for (c, &(_, mc)) in atoms.iter().enumerate() {
            m[(r, c)] += I * (mr * mc).sqrt();
        }
    }
    let mut zeros = Vec::with_capacity(n);
    for z0 in crate::linalg::general_eigenvalues(m)? {
        let z = polish_j_equals_i(j, z0)?;
        if !(z.im > 0.0) {
            return Err(Error::NotHerglotz(format!(
                "J = i at {z} outside the upper half-plane"
            )));
        }
        zeros.push(omega(z)?);
    }
    // The front constant is fixed by one sample point.
    let probe = Complex64::new(0.3, 1.7);
    let want = {
        let jz = j.eval(probe)?;
        (ONE + I * jz) / (ONE - I * jz)
    };
    let unit = BlaschkeProduct::new(zeros.clone(), ONE)?;
    let c = want / unit.eval(omega(probe)?)?;
    Ok(HalfPlaneInner::new(BlaschkeProduct::new(
        zeros,
        c / c.norm(),
    )?))
}

fn polish_j_equals_i(j: &HerglotzRational, mut z: Complex64) -> Result<Complex64> {
    let mut residual = f64::INFINITY;
    for _ in 0..POLISH_ITERATIONS {
        let r = j.eval(z)? - I;
        residual = r.norm();
        let step = r / j.eval_derivative(z)?;
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
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

/// Recovers `J = i(1 − θ_H)/(1 + θ_H)` as a coefficient pair.
///
/// With `θ_H = c·Π[(1 − aⱼ)z − i(1 + aⱼ)] / Π[(1 − āⱼ)z + i(1 + āⱼ)] = N/D`,
/// `J = i(D − N)/(D + N)`; the leading numerator coefficient cancels
/// analytically when `θ_H(∞) = 1` and is trimmed, and the denominator is
/// made monic.
pub fn cayley_inverse(theta: &HalfPlaneInner) -> Result<HerglotzRational> {
    let b = theta.disk();
    let mut num_h = Poly::constant(b.constant());
    let mut den_h = Poly::constant(ONE);
    for &a in b.zeros() {
        num_h = &num_h * &Poly::linear(-I * (ONE + a), ONE - a);
        den_h = &den_h * &Poly::linear(I * (ONE + a.conj()), ONE - a.conj());
    }
    let num = (&den_h - &num_h).scale(I);
    let den = &den_h + &num_h;
    let scale = num.max_coeff().max(den.max_coeff());
    let mut num = num.trimmed(1e-12 * scale / num.max_coeff().max(f64::MIN_POSITIVE));
    let mut den = den;
    if num.degree() >= den.degree() && !num.is_zero() {
        let rel = num.leading().norm() / scale;
        if rel < 1e-10 {
            let mut c = num.coeffs().to_vec();
            c.pop();
            num = Poly::new(c);
        }
    }
    let lead = den.leading();
    num = num.scale(ONE / lead);
    den = den.scale(ONE / lead);
    HerglotzRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::LineAtomicMeasure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dirac_transfers_to_cayley_map() {
        let j = HerglotzRational::from_line_measure(&LineAtomicMeasure::dirac(0.0));
        let theta = cayley_transfer(&j).unwrap();
        assert!(theta.eval(I).unwrap().norm() < 1e-15);
        for z in [c(0.3, 0.2), c(-2.0, 5.0), c(0.0, 2.0)] {
            let want = (z - I) / (z + I);
            assert!((theta.eval(z).unwrap() - want).norm() < 1e-14);
            assert!(theta.eval(z).unwrap().norm() < 1.0);
        }
        assert!((theta.eval(c(3.0, 0.0)).unwrap().norm() - 1.0).abs() < 1e-14);
        let xs = theta.level_set_real(relabel(3.0)).unwrap();
        assert_eq!(xs.len(), 1);
        assert!((xs[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_on_coefficients() {
        let mu = LineAtomicMeasure::new(vec![(-1.0, 0.2), (0.1, 0.5), (0.7, 0.3)]).unwrap();
        let j = HerglotzRational::from_line_measure(&mu);
        let theta = cayley_transfer(&j).unwrap();
        let back = cayley_inverse(&theta).unwrap();
        assert!(back.coefficient_distance(&j) < 1e-10);
        let xs = theta.level_set_real(relabel(-2.0)).unwrap();
        let roots = super::super::secular::secular_roots_line(&j, -2.0).unwrap();
        for (x, r) in xs.iter().zip(&roots) {
            assert!((x - r).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_herglotz() {
        let j = HerglotzRational::new(Poly::constant(ONE), Poly::monomial(1)).unwrap();
        assert!(matches!(cayley_transfer(&j), Err(Error::NotHerglotz(_))));
    }
}
