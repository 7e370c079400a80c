//! Splitting `f₀f̂₀ = g + θh` with `g, h ∈ K_θ`, and the resulting closed
//! form of the Cauchy transform of `|f|²μ_α`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::clark_operator::hat_conjugate;
use super::space::{ModelSpace, ModelVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rank_one::clark::clark_measure;
use crate::rank_one::inner::disk_samples;

/// Largest accepted condition number of the `2N × 2N` Gram system.
pub const MAX_CONDITION: f64 = 1e12;
/// Boundary samples used for the residual of the splitting.
pub const BOUNDARY_SAMPLES: usize = 64;
/// Accepted deviation of `‖f‖` from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct Lemma7 {
    pub f: ModelVector,
    pub f_at_origin: Complex64,
    /// `f − f(0)`.
    pub f0: ModelVector,
    pub f0_hat: ModelVector,
    pub g: ModelVector,
    pub h: ModelVector,
    pub condition: f64,
    /// `max |f₀f̂₀ − g − θh|` on the boundary samples.
    pub boundary_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma7Values {
    pub f: Complex64,
    pub f0: Complex64,
    pub f0_hat: Complex64,
    pub g: Complex64,
    pub h: Complex64,
    pub theta: Complex64,
}

/// Decomposes a unit vector `f` of `K_θ` (`θ(0) = 0`).
///
/// `f₀f̂₀` is rational of degree `≤ 2N − 1` with the poles of `θ²`, so it lies
/// in `K_{θ²} = K_θ ⊕ θK_θ`; `g` and `h` are its coordinates there, found by
/// solving the Gram system of `{e_k} ∪ {θe_k}` on the boundary grid.
pub fn lemma7_decompose(ms: &ModelSpace, f: &ModelVector) -> Result<Lemma7> {
    ms.check(f)?;
    let t0 = ms.theta().at_origin();
    if t0.norm() > super::clark_operator::ORIGIN_TOLERANCE {
        return Err(Error::ThetaAtOriginNonzero(t0));
    }
    let norm = f.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Validation {
            field: "f".into(),
            reason: format!("‖f‖ = {norm} but a unit vector is required"),
        });
    }
    let f_at_origin = ms.eval(f, ZERO)?;
    let one = ms.project(|_| ONE)?;
    let f0 = f.sub(&one.scale(f_at_origin));
    let f0_hat = hat_conjugate(ms, &f0)?;

    let n = ms.dim();
    let grid = ms.grid();
    let m = grid.len();
    let theta: Vec<Complex64> = grid
        .iter()
        .map(|&xi| ms.theta().eval(xi))
        .collect::<Result<_>>()?;
    let basis = ms.basis_on_grid();
    let b = CMatrix::from_fn(m, 2 * n, |r, c| {
        if c < n {
            basis[(r, c)]
        } else {
            theta[r] * basis[(r, c - n)]
        }
    });
    let a = ms.values_on_grid(&f0)?;
    let ah = ms.values_on_grid(&f0_hat)?;
    let p = CMatrix::from_fn(m, 1, |r, _| a[r] * ah[r]);
    let scale = Complex64::new(m as f64, 0.0);
    let gram = b.adjoint() * &b / scale;
    let rhs = b.adjoint() * p / scale;

    let svd = gram.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::ModelSpace(format!("Gram solve failed: {e}")))?;
    let g = ms.vector((0..n).map(|k| x[(k, 0)]).collect())?;
    let h = ms.vector((n..2 * n).map(|k| x[(k, 0)]).collect())?;

    let mut out = Lemma7 {
        f: f.clone(),
        f_at_origin,
        f0,
        f0_hat,
        g,
        h,
        condition,
        boundary_residual: 0.0,
    };
    out.boundary_residual = (0..BOUNDARY_SAMPLES)
        .map(|k| {
            let xi = Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / BOUNDARY_SAMPLES as f64);
            let v = out.values(ms, xi)?;
            Ok((v.f0 * v.f0_hat - v.g - v.theta * v.h).norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(out)
}

impl Lemma7 {
    pub fn values(&self, ms: &ModelSpace, z: Complex64) -> Result<Lemma7Values> {
        Ok(Lemma7Values {
            f: ms.eval(&self.f, z)?,
            f0: ms.eval(&self.f0, z)?,
            f0_hat: ms.eval(&self.f0_hat, z)?,
            g: ms.eval(&self.g, z)?,
            h: ms.eval(&self.h, z)?,
            theta: ms.theta().eval(z)?,
        })
    }

    /// `(g + αh + f(0)f̂₀ + α·conj(f(0))·f₀ + α|f(0)|²)/(α − θ)` at `z`.
    pub fn knu_alpha(&self, ms: &ModelSpace, alpha: Complex64, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain {
                point: z,
                reason: "the Cauchy transform is evaluated in the open disk",
            });
        }
        let v = self.values(ms, z)?;
        let c = self.f_at_origin;
        let num = v.g + alpha * v.h + c * v.f0_hat + alpha * c.conj() * v.f0 + alpha * c.norm_sqr();
        let den = alpha - v.theta;
        if den == ZERO {
            return Err(Error::Pole(z));
        }
        Ok(num / den)
    }

    /// Cauchy transform of `|f|²μ_α` at `z`, straight from the atoms.
    pub fn knu_alpha_direct(
        &self,
        ms: &ModelSpace,
        alpha: Complex64,
        z: Complex64,
    ) -> Result<Complex64> {
        let mu = clark_measure(ms.theta(), alpha)?;
        let nu = mu.reweighted(|xi| {
            ms.eval(&self.f, xi)
                .map(|v| v.norm_sqr())
                .unwrap_or(f64::NAN)
        })?;
        nu.cauchy_transform(z)
    }

    /// `max |f̂₀(ξ) − α·conj(f₀(ξ))|` over the atoms `ξ` of `μ_α`.
    pub fn atom_defect(&self, ms: &ModelSpace, alpha: Complex64) -> Result<f64> {
        let mu = clark_measure(ms.theta(), alpha)?;
        let mut worst = 0.0f64;
        for xi in mu.points() {
            let v = self.values(ms, xi)?;
            worst = worst.max((v.f0_hat - alpha * v.f0.conj()).norm());
        }
        Ok(worst)
    }

    /// `max |Kν₁(z)(1 − θ(z)) − g(z) − h(z)|` over disk samples, for
    /// `ν₁ = |f|²μ₁` and `f(0) = 0`.
    pub fn nu_one_defect(&self, ms: &ModelSpace) -> Result<f64> {
        if self.f_at_origin.norm() > super::clark_operator::HAT_ORIGIN_TOLERANCE {
            return Err(Error::NonzeroAtOrigin(self.f_at_origin));
        }
        let mut worst = 0.0f64;
        for z in disk_samples(20) {
            let k = self.knu_alpha_direct(ms, ONE, z)?;
            let v = self.values(ms, z)?;
            worst = worst.max((k * (ONE - v.theta) - v.g - v.h).norm());
        }
        Ok(worst)
    }
}

/// `max |Kμ₁(z)(1 − θ(z)) − 1|` over disk samples.
pub fn mu_one_defect(ms: &ModelSpace) -> Result<f64> {
    let mu = clark_measure(ms.theta(), ONE)?;
    let mut worst = 0.0f64;
    for z in disk_samples(20) {
        let k = mu.cauchy_transform(z)?;
        worst = worst.max((k * (ONE - ms.theta().eval(z)?) - ONE).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::BlaschkeProduct;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn worked_splittings() {
        let ms = ModelSpace::new(BlaschkeProduct::monomial(2, ONE).unwrap()).unwrap();
        let f = ms.vector(vec![ZERO, ONE]).unwrap();
        let d = lemma7_decompose(&ms, &f).unwrap();
        assert!(d.g.norm() < 1e-12);
        assert!(d.h.max_distance(&ms.vector(vec![ONE, ZERO]).unwrap()) < 1e-12);

        let ms = ModelSpace::new(BlaschkeProduct::monomial(3, ONE).unwrap()).unwrap();
        let s = c(FRAC_1_SQRT_2, 0.0);
        let f = ms.vector(vec![ZERO, s, s]).unwrap();
        let d = lemma7_decompose(&ms, &f).unwrap();
        assert!(d.g.max_distance(&ms.vector(vec![ZERO, ZERO, c(0.5, 0.0)]).unwrap()) < 1e-12);
        assert!(d.h.max_distance(&ms.vector(vec![ONE, c(0.5, 0.0), ZERO]).unwrap()) < 1e-12);
        assert!(d.boundary_residual < 1e-12);
    }

    #[test]
    fn cauchy_transform_formula() {
        let theta =
            BlaschkeProduct::new(vec![ZERO, c(0.4, -0.3), c(-0.5, 0.5), c(0.1, 0.8)], ONE).unwrap();
        let ms = ModelSpace::new(theta).unwrap();
        let raw = [c(0.3, 0.2), c(-0.4, 0.1), c(0.2, 0.6), c(0.5, -0.1)];
        let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let f = ms.vector(raw.iter().map(|v| v / norm).collect()).unwrap();
        let d = lemma7_decompose(&ms, &f).unwrap();
        assert!(d.boundary_residual < 1e-9);
        for k in 0..6 {
            let alpha = Complex64::from_polar(1.0, 1.1 * k as f64 + 0.3);
            assert!(d.atom_defect(&ms, alpha).unwrap() < 1e-9);
            for z in disk_samples(8) {
                let a = d.knu_alpha(&ms, alpha, z).unwrap();
                let b = d.knu_alpha_direct(&ms, alpha, z).unwrap();
                assert!((a - b).norm() < 1e-9, "{a} vs {b}");
            }
        }
        assert!(mu_one_defect(&ms).unwrap() < 1e-10);
    }

    #[test]
    fn identities_for_vanishing_origin() {
        let ms = ModelSpace::new(BlaschkeProduct::monomial(2, ONE).unwrap()).unwrap();
        let f = ms.vector(vec![ZERO, ONE]).unwrap();
        let d = lemma7_decompose(&ms, &f).unwrap();
        let alpha = Complex64::from_polar(1.0, 0.9);
        let z = c(0.3, -0.4);
        let want = alpha / (alpha - z * z);
        assert!((d.knu_alpha(&ms, alpha, z).unwrap() - want).norm() < 1e-13);
        assert!(d.nu_one_defect(&ms).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_vectors() {
        let ms = ModelSpace::new(BlaschkeProduct::monomial(2, ONE).unwrap()).unwrap();
        let f = ms.vector(vec![ZERO, c(2.0, 0.0)]).unwrap();
        assert!(matches!(
            lemma7_decompose(&ms, &f),
            Err(Error::Validation { .. })
        ));
    }
}
