//! The compressed shift's unitary rank-one perturbations `T_α` on `K_θ`
//! and the Clark unitary `V_α : L²(μ_α) → K_θ`, `V_α f = K(fμ_α)/Kμ_α`.
//!
//! Everything here assumes `θ(0) = 0`; the formula for `T_α` is not valid
//! otherwise and no generalization is attempted.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::space::{ModelSpace, ModelVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::measures::CircleAtomicMeasure;
use crate::rank_one::clark::{circle_measure_distance, clark_measure};
use crate::rank_one::oracle::spectral_measure_of_vector;

/// `|θ(0)|` above which the constructions here are refused.
pub const ORIGIN_TOLERANCE: f64 = 1e-12;
/// `|f(0)|` above which `f̂` is refused.
pub const HAT_ORIGIN_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn require_inner_at_origin_zero(ms: &ModelSpace) -> Result<()> {
    let t0 = ms.theta().at_origin();
    if t0.norm() > ORIGIN_TOLERANCE {
        return Err(Error::ThetaAtOriginNonzero(t0));
    }
    Ok(())
}

/// Matrix of `T_α f = z(f − (f, θ/z)θ/z) + (f, θ/z)α` in the basis of `ms`.
pub fn t_alpha_matrix(ms: &ModelSpace, alpha: Complex64) -> Result<CMatrix> {
    require_inner_at_origin_zero(ms)?;
    let n = ms.dim();
    let grid = ms.grid();
    let m = grid.len() as f64;
    let theta: Vec<Complex64> = grid
        .iter()
        .map(|&xi| ms.theta().eval(xi))
        .collect::<Result<_>>()?;
    let basis = ms.basis_on_grid();
    let mut t = CMatrix::zeros(n, n);
    for k in 0..n {
        // (e_k, θ/z), with 1/ξ = conj(ξ) on the circle
        let c: Complex64 = (0..grid.len())
            .map(|r| basis[(r, k)] * (theta[r] * grid[r].conj()).conj())
            .sum::<Complex64>()
            / m;
        let values: Vec<Complex64> = (0..grid.len())
            .map(|r| grid[r] * basis[(r, k)] - c * theta[r] + c * alpha)
            .collect();
        let col = ms.project_grid_values(&values)?;
        for (row, v) in col.coefficients().iter().enumerate() {
            t[(row, k)] = *v;
        }
    }
    Ok(t)
}

/// Rotation of the quadrature grid that keeps its nodes as far as possible
/// from the given angles.
fn safe_offset(ms: &ModelSpace, angles: &[f64]) -> f64 {
    let h = TAU / ms.grid_size() as f64;
    let mut r: Vec<f64> = angles.iter().map(|s| s.rem_euclid(h)).collect();
    r.sort_by(f64::total_cmp);
    let mut best = (r[0] + h - r[r.len() - 1], r[r.len() - 1]);
    for w in r.windows(2) {
        if w[1] - w[0] > best.0 {
            best = (w[1] - w[0], w[0]);
        }
    }
    (best.1 + best.0 / 2.0).rem_euclid(h)
}

fn clark_measure_checked(ms: &ModelSpace, alpha: Complex64) -> Result<CircleAtomicMeasure> {
    require_inner_at_origin_zero(ms)?;
    let mu = clark_measure(ms.theta(), alpha)?;
    if mu.len() != ms.dim() {
        return Err(Error::CriticalValue {
            value: alpha,
            multiplicity: ms.dim() + 1 - mu.len(),
        });
    }
    Ok(mu)
}

/// `V_α f = K(fμ_α)/Kμ_α` for `f` given by its values at the atoms of
/// `μ_α` (in increasing angle order).
///
/// Both transforms are evaluated directly from the atoms; their quotient is
/// bounded on the circle (the singularities at the atoms cancel), and the
/// projection grid is rotated away from the atoms.
pub fn v_alpha(ms: &ModelSpace, alpha: Complex64, values: &[Complex64]) -> Result<ModelVector> {
    let mu = clark_measure_checked(ms, alpha)?;
    v_alpha_with(ms, &mu, values)
}

fn v_alpha_with(
    ms: &ModelSpace,
    mu: &CircleAtomicMeasure,
    values: &[Complex64],
) -> Result<ModelVector> {
    if values.len() != mu.len() {
        return Err(Error::Dimension(format!(
            "{} values for a Clark measure with {} atoms",
            values.len(),
            mu.len()
        )));
    }
    let points = mu.points();
    let masses = mu.masses();
    let offset = safe_offset(ms, &mu.angles());
    ms.project_rotated(
        |z| {
            let mut num = ZERO;
            let mut den = ZERO;
            for ((&xi, &w), &f) in points.iter().zip(&masses).zip(values) {
                let k = w / (Complex64::new(1.0, 0.0) - xi.conj() * z);
                num += k * f;
                den += k;
            }
            num / den
        },
        offset,
    )
}

/// `V_α* F`: the boundary values of `F` at the atoms of `μ_α`.
pub fn v_alpha_star(ms: &ModelSpace, alpha: Complex64, f: &ModelVector) -> Result<Vec<Complex64>> {
    let mu = clark_measure_checked(ms, alpha)?;
    mu.points().into_iter().map(|xi| ms.eval(f, xi)).collect()
}

/// `V_α` as a matrix from the orthonormal basis `δ_ξ/√μ_α{ξ}` of
/// `L²(μ_α)` to the basis of `ms`, together with `μ_α`.
pub fn v_alpha_matrix(ms: &ModelSpace, alpha: Complex64) -> Result<(CMatrix, CircleAtomicMeasure)> {
    let mu = clark_measure_checked(ms, alpha)?;
    let n = mu.len();
    let masses = mu.masses();
    let mut v = CMatrix::zeros(ms.dim(), n);
    for j in 0..n {
        let mut values = vec![ZERO; n];
        values[j] = Complex64::new(1.0 / masses[j].sqrt(), 0.0);
        let col = v_alpha_with(ms, &mu, &values)?;
        for (row, c) in col.coefficients().iter().enumerate() {
            v[(row, j)] = *c;
        }
    }
    Ok((v, mu))
}

/// `‖T_α − V_α Y_α V_α*‖₂` with `Y_α` multiplication by the independent
/// variable on `L²(μ_α)`.
pub fn intertwine_check(ms: &ModelSpace, alpha: Complex64) -> Result<f64> {
    let t = t_alpha_matrix(ms, alpha)?;
    let (v, mu) = v_alpha_matrix(ms, alpha)?;
    let y = CMatrix::from_diagonal(&linalg::cvector(&mu.points()));
    Ok(linalg::spectral_norm(&(t - &v * y * v.adjoint())))
}

/// `‖V_α*V_α − I‖₂` in orthonormal coordinates.
pub fn v_alpha_unitarity(ms: &ModelSpace, alpha: Complex64) -> Result<f64> {
    let (v, _) = v_alpha_matrix(ms, alpha)?;
    Ok(linalg::unitarity_residual(&v))
}

/// Compares the spectral measure of the constant `1` under `T_α` with
/// `μ_α`: `(max angle deviation, max mass deviation)`.
pub fn spectral_consistency(ms: &ModelSpace, alpha: Complex64) -> Result<(f64, f64)> {
    let t = t_alpha_matrix(ms, alpha)?;
    let one = ms.project(|_| Complex64::new(1.0, 0.0))?;
    let nu = spectral_measure_of_vector(&t, &linalg::cvector(one.coefficients()))?;
    let mu = clark_measure_checked(ms, alpha)?;
    circle_measure_distance(&nu, &mu).ok_or_else(|| {
        Error::Eigensolver(format!(
            "T_α has {} spectral atoms but μ_α has {}",
            nu.len(),
            mu.len()
        ))
    })
}

/// `f̂`: the element of `K_θ` with boundary values `θ·conj(f)`; defined for
/// `f(0) = 0`.
pub fn hat_conjugate(ms: &ModelSpace, f: &ModelVector) -> Result<ModelVector> {
    let f0 = ms.eval(f, ZERO)?;
    if f0.norm() > HAT_ORIGIN_TOLERANCE {
        return Err(Error::NonzeroAtOrigin(f0));
    }
    let values = ms.values_on_grid(f)?;
    let hat: Vec<Complex64> = ms
        .grid()
        .iter()
        .zip(values)
        .map(|(&xi, v)| Ok(ms.theta().eval(xi)? * v.conj()))
        .collect::<Result<_>>()?;
    ms.project_grid_values(&hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::BlaschkeProduct;
    use std::f64::consts::FRAC_1_SQRT_2;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn space(zeros: Vec<Complex64>) -> ModelSpace {
        ModelSpace::new(BlaschkeProduct::new(zeros, ONE).unwrap()).unwrap()
    }

    #[test]
    fn t_alpha_small_cases() {
        let alpha = Complex64::from_polar(1.0, 0.8);
        let ms = space(vec![ZERO]);
        let t = t_alpha_matrix(&ms, alpha).unwrap();
        assert!((t[(0, 0)] - alpha).norm() < 1e-14);

        let ms = space(vec![ZERO, ZERO]);
        let t = t_alpha_matrix(&ms, alpha).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[ZERO, alpha, ONE, ZERO]);
        assert!(linalg::spectral_norm(&(t - want)) < 1e-14);
    }

    #[test]
    fn t_alpha_requires_vanishing_origin() {
        let ms = space(vec![Complex64::new(0.5, 0.0)]);
        assert!(matches!(
            t_alpha_matrix(&ms, ONE),
            Err(Error::ThetaAtOriginNonzero(_))
        ));
    }

    #[test]
    fn v_alpha_examples() {
        let ms = space(vec![ZERO, ZERO]);
        let one = v_alpha(&ms, ONE, &[ONE, ONE]).unwrap();
        assert!(
            (one.coefficients()[0] - ONE).norm() < 1e-13 && one.coefficients()[1].norm() < 1e-13
        );
        // atoms sorted by angle: 1 then −1
        let z = v_alpha(&ms, ONE, &[ONE, -ONE]).unwrap();
        assert!(z.coefficients()[0].norm() < 1e-13 && (z.coefficients()[1] - ONE).norm() < 1e-13);
        let back = v_alpha_star(&ms, ONE, &z).unwrap();
        assert!((back[0] - ONE).norm() < 1e-14 && (back[1] + ONE).norm() < 1e-14);
    }

    #[test]
    fn intertwining_and_consistency() {
        let ms = space(vec![ZERO, ZERO]);
        assert!(intertwine_check(&ms, I).unwrap() < 1e-10);
        let ms = space(vec![
            ZERO,
            Complex64::new(0.3, -0.5),
            Complex64::new(-0.6, 0.2),
        ]);
        for k in 0..5 {
            let alpha = Complex64::from_polar(1.0, 1.3 * k as f64 + 0.2);
            assert!(intertwine_check(&ms, alpha).unwrap() < 1e-9);
            assert!(v_alpha_unitarity(&ms, alpha).unwrap() < 1e-9);
            let (p, m) = spectral_consistency(&ms, alpha).unwrap();
            assert!(p < 1e-9 && m < 1e-8, "{p} {m}");
        }
    }

    #[test]
    fn hat_examples() {
        let ms = space(vec![ZERO, ZERO]);
        let z = ms.vector(vec![ZERO, ONE]).unwrap();
        assert!(hat_conjugate(&ms, &z).unwrap().max_distance(&z) < 1e-14);
        let one = ms.vector(vec![ONE, ZERO]).unwrap();
        assert!(matches!(
            hat_conjugate(&ms, &one),
            Err(Error::NonzeroAtOrigin(_))
        ));

        let ms = space(vec![ZERO; 3]);
        let z2 = ms.vector(vec![ZERO, ZERO, ONE]).unwrap();
        let z1 = ms.vector(vec![ZERO, ONE, ZERO]).unwrap();
        assert!(hat_conjugate(&ms, &z2).unwrap().max_distance(&z1) < 1e-14);

        let ms = space(vec![
            ZERO,
            Complex64::new(0.4, 0.4),
            Complex64::new(-0.2, 0.7),
        ]);
        // e_1, e_2 vanish at the origin because the first zero is 0
        let f = ms
            .vector(vec![
                ZERO,
                Complex64::new(FRAC_1_SQRT_2, 0.1),
                Complex64::new(0.2, -0.3),
            ])
            .unwrap();
        let twice = hat_conjugate(&ms, &hat_conjugate(&ms, &f).unwrap()).unwrap();
        assert!(twice.max_distance(&f) < 1e-13);
    }
}
