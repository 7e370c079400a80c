//! The rank-two construction on top of a model space.
//!
//! Take `U = diag(ξ_j)` on the atoms of `μ₁`, `φ₁ = (√m_j)` and
//! `φ₂ = (√m_j f(ξ_j))` for a unit `f ∈ K_θ` with `f(0) = 0`. Through the
//! Clark unitary `V₁` the first perturbation becomes `T_α` and `φ₂` becomes
//! `f`, so `φ₂`'s spectral measure for `U_α` is `|f|²μ_α` and its Cauchy
//! transform is `W = (g + αh)/(α − θ)`. Perturbing once more along `φ₂`
//! gives `K = βW/(1 + (β − 1)W)`.
//!
//! Averaging that over a curve `ξ ↦ (I₁(ξ), I₂(ξ))` replaces `α, β` by their
//! means `I₁(0), I₂(0)` after conjugation, which yields `φ`.

use num_complex::Complex64;

use super::curve::AnalyticCurve;
use super::family::RankNPerturbationFamily;
use crate::error::{Error, Result};
use crate::herglotz::BlaschkeProduct;
use crate::linalg::{self, CVector};
use crate::measures::CircleAtomicMeasure;
use crate::model_space::{lemma7_decompose, Lemma7, ModelSpace, ModelVector};
use crate::rank_one::clark::clark_measure;
use crate::rank_one::model::{CyclicOperatorModel, Kind};
use crate::rank_one::oracle::spectral_measure_of_vector;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|f(0)|` accepted as zero.
pub const ORIGIN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct RankTwoSetup {
    ms: ModelSpace,
    lemma: Lemma7,
    family: RankNPerturbationFamily,
}

impl RankTwoSetup {
    /// `f` is given by its coefficients in the basis of `K_θ`.
    pub fn new(theta: BlaschkeProduct, f: Vec<Complex64>) -> Result<Self> {
        let ms = ModelSpace::new(theta)?;
        let f = ms.vector(f)?;
        Self::from_vector(ms, &f)
    }

    pub fn from_vector(ms: ModelSpace, f: &ModelVector) -> Result<Self> {
        let lemma = lemma7_decompose(&ms, f)?;
        if lemma.f_at_origin.norm() > ORIGIN_TOLERANCE {
            return Err(Error::NonzeroAtOrigin(lemma.f_at_origin));
        }
        let mu = clark_measure(ms.theta(), ONE)?;
        let base = CyclicOperatorModel::new(Kind::Circle, mu.angles(), mu.masses())?;
        let phi2: Vec<Complex64> = mu
            .atoms()
            .iter()
            .map(|&(s, m)| Ok(ms.eval(f, Complex64::from_polar(1.0, s))? * m.sqrt()))
            .collect::<Result<_>>()?;
        let family = RankNPerturbationFamily::new(
            base.clone(),
            vec![base.cyclic_vector_complex(), linalg::cvector(&phi2)],
        )?;
        Ok(Self { ms, lemma, family })
    }

    pub fn model_space(&self) -> &ModelSpace {
        &self.ms
    }

    pub fn decomposition(&self) -> &Lemma7 {
        &self.lemma
    }

    pub fn family(&self) -> &RankNPerturbationFamily {
        &self.family
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        self.ms.theta()
    }

    /// `W = (g + αh)/(α − θ)`: Cauchy transform of `|f|²μ_α`.
    pub fn knu_alpha(&self, alpha: Complex64, z: Complex64) -> Result<Complex64> {
        self.lemma.knu_alpha(&self.ms, alpha, z)
    }

    /// `βW/(1 + (β − 1)W)`.
    pub fn knu_alpha_beta(
        &self,
        alpha: Complex64,
        beta: Complex64,
        z: Complex64,
    ) -> Result<Complex64> {
        let w = self.knu_alpha(alpha, z)?;
        let den = ONE + (beta - ONE) * w;
        if den == ZERO {
            return Err(Error::Pole(z));
        }
        Ok(beta * w / den)
    }

    /// Spectral measure of `φ₂` for the recursive `U_{(α,β)}`.
    pub fn oracle_measure(&self, alpha: Complex64, beta: Complex64) -> Result<CircleAtomicMeasure> {
        let u = self.family.recursive_unitary(&[alpha, beta])?;
        spectral_measure_of_vector(&u, &self.family.vectors()[1])
    }

    pub fn oracle_knu_alpha_beta(
        &self,
        alpha: Complex64,
        beta: Complex64,
        z: Complex64,
    ) -> Result<Complex64> {
        self.oracle_measure(alpha, beta)?.cauchy_transform(z)
    }

    /// `Re[(ᾱg(z) + h(z))/(1 − ᾱθ(z))]`.
    pub fn herglotz_real_part(&self, alpha: Complex64, z: Complex64) -> Result<f64> {
        let v = self.lemma.values(&self.ms, z)?;
        let a = alpha.conj();
        Ok(((a * v.g + v.h) / (ONE - a * v.theta)).re)
    }

    fn phi_at(&self, curve: &AnalyticCurve, z: Complex64) -> Result<Complex64> {
        if curve.len() != 2 {
            return Err(Error::Dimension(format!(
                "φ is defined for two-component curves, got {}",
                curve.len()
            )));
        }
        let origin = curve.at_origin();
        let (c1, c2) = (origin[0].conj(), origin[1].conj());
        let v = self.lemma.values(&self.ms, z)?;
        let w1 = (c1 * v.g + v.h) / (ONE - c1 * v.theta);
        Ok(w1 / (c2 + (ONE - c2) * w1))
    }

    /// `φ(z) = W₁/(Ī₂(0) + (1 − Ī₂(0))W₁)` with
    /// `W₁ = (Ī₁(0)g + h)/(1 − Ī₁(0)θ)`, for `|z| < 1`.
    pub fn phi_density(&self, curve: &AnalyticCurve, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain {
                point: z,
                reason: "φ is evaluated in the open disk",
            });
        }
        self.phi_at(curve, z)
    }

    /// Boundary value of `φ` at `e^{is}`.
    pub fn phi_boundary(&self, curve: &AnalyticCurve, s: f64) -> Result<Complex64> {
        self.phi_at(curve, Complex64::from_polar(1.0, s))
    }

    /// `1/(1 − |I₂(0)|)`.
    pub fn phi_bound(curve: &AnalyticCurve) -> f64 {
        1.0 / (1.0 - curve.at_origin()[curve.len() - 1].norm())
    }

    pub fn phi2(&self) -> &CVector {
        &self.family.vectors()[1]
    }
}

/// `min Re[(ᾱg + h)/(1 − ᾱθ)]` over the grids.
pub fn herglotz_positivity_check(
    setup: &RankTwoSetup,
    alphas: &[Complex64],
    zs: &[Complex64],
) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for &z in zs {
        for &a in alphas {
            worst = worst.min(setup.herglotz_real_part(a, z)?);
        }
    }
    Ok(worst)
}
