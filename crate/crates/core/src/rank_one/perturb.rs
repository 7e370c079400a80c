use num_complex::Complex64;

use super::inner::inner_from_unitary;
use super::model::CyclicOperatorModel;
use crate::error::{Error, Result};
use crate::herglotz::secular::{residue_mass_shifted, secular_roots_shifted};
use crate::herglotz::HerglotzRational;
use crate::measures::{CircleAtomicMeasure, LineAtomicMeasure};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `Kμ_λ(z) = K₀(z)/(1 + λK₀(z))`.
pub fn aronszajn_krein_eval(k0: &HerglotzRational, lambda: f64, z: Complex64) -> Result<Complex64> {
    let k = k0.eval(z)?;
    let d = ONE + k * lambda;
    if d == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(z));
    }
    Ok(k / d)
}

/// Spectral measure `μ_λ` of `φ` for `A + λ(·, φ)φ`: atoms at the roots of
/// `Kμ = −1/λ`, masses `1/(λ²Kμ′)`. `λ = 0` returns `μ` itself.
pub fn perturb_selfadjoint(model: &CyclicOperatorModel, lambda: f64) -> Result<LineAtomicMeasure> {
    let mu = model.line_measure()?;
    if lambda == 0.0 {
        return Ok(mu);
    }
    let atoms = mu.atoms();
    let roots = secular_roots_shifted(atoms, lambda)?;
    let perturbed = roots
        .iter()
        .map(|&r| Ok((r.position(atoms), residue_mass_shifted(atoms, lambda, r)?)))
        .collect::<Result<Vec<_>>>()?;
    LineAtomicMeasure::new(perturbed)
}

/// Spectral measure `ν_α` of `v` for `U + (α − 1)(·, U⁻¹v)v`.
///
/// Atoms are the level set `{θ = α}` of `θ = 1 − 1/Kν₁`; each mass is the
/// residue of `Kν_α = αKν₁/(1 + (α − 1)Kν₁)` at the atom, which works out to
/// `α / (ξ(α − 1)²Kν₁′(ξ))`. `α = 1` returns `ν₁`.
pub fn perturb_unitary(
    model: &CyclicOperatorModel,
    alpha: Complex64,
) -> Result<CircleAtomicMeasure> {
    let nu = model.circle_measure()?;
    if alpha == ONE {
        return Ok(nu);
    }
    let theta = inner_from_unitary(model)?;
    let points = nu.points();
    let weights = nu.masses();
    let atoms = theta
        .level_set(alpha)?
        .into_iter()
        .map(|xi| {
            let dk: Complex64 = points
                .iter()
                .zip(&weights)
                .map(|(&p, &w)| {
                    let d = ONE - p.conj() * xi;
                    p.conj() * w / (d * d)
                })
                .sum();
            let am1 = alpha - ONE;
            let mass = alpha / (xi * am1 * am1 * dk);
            (xi.arg(), mass.re)
        })
        .collect();
    CircleAtomicMeasure::new(atoms)
}
