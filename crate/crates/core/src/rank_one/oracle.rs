//! Independent dense-matrix oracles: build the perturbed operator
//! explicitly, diagonalize it, and read off the spectral measure of a vector.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::model::CyclicOperatorModel;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::measures::{CircleAtomicMeasure, LineAtomicMeasure};

/// `A + λ(·, φ)φ` as a dense real symmetric matrix.
pub fn selfadjoint_matrix(model: &CyclicOperatorModel, lambda: f64) -> Result<DMatrix<f64>> {
    let a = model.real_matrix()?;
    let phi = DVector::from_vec(model.cyclic_vector());
    Ok(a + &phi * phi.transpose() * lambda)
}

/// `U_α = U + (α − 1)(·, U⁻¹v)v = (I + (α − 1)vv*)U`.
pub fn unitary_perturbation(u: &CMatrix, v: &CVector, alpha: Complex64) -> CMatrix {
    let n = u.nrows();
    let p = CMatrix::identity(n, n) + v * v.adjoint() * (alpha - Complex64::new(1.0, 0.0));
    p * u
}

pub fn unitary_matrix(model: &CyclicOperatorModel, alpha: Complex64) -> Result<CMatrix> {
    let u = model.unitary_matrix()?;
    Ok(unitary_perturbation(
        &u,
        &model.cyclic_vector_complex(),
        alpha,
    ))
}

/// Spectral measure of `φ` for `A + λ(·, φ)φ` from a full symmetric
/// eigendecomposition: atoms at the eigenvalues, masses `|⟨φ, v_k⟩|²`.
pub fn matrix_oracle_selfadjoint(
    model: &CyclicOperatorModel,
    lambda: f64,
) -> Result<LineAtomicMeasure> {
    let m = selfadjoint_matrix(model, lambda)?;
    let phi = DVector::from_vec(model.cyclic_vector());
    let (values, vectors) = linalg::symmetric_eigen(m)?;
    let atoms = values
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, vectors.column(k).dot(&phi).powi(2)))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    LineAtomicMeasure::new(atoms)
}

/// Spectral measure of `v` for a dense unitary matrix.
pub fn spectral_measure_of_vector(
    matrix: &CMatrix,
    vector: &CVector,
) -> Result<CircleAtomicMeasure> {
    if matrix.nrows() != vector.len() {
        return Err(Error::Dimension(format!(
            "{}×{} matrix against vector of length {}",
            matrix.nrows(),
            matrix.ncols(),
            vector.len()
        )));
    }
    let (values, vectors) = linalg::unitary_eigen(matrix)?;
    let atoms = values
        .iter()
        .enumerate()
        .map(|(k, &ev)| (ev.arg(), vectors.column(k).dotc(vector).norm_sqr()))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    CircleAtomicMeasure::new(atoms)
}

/// Spectral measure of the cyclic vector for `U_α`.
pub fn matrix_oracle_unitary(
    model: &CyclicOperatorModel,
    alpha: Complex64,
) -> Result<CircleAtomicMeasure> {
    let u = unitary_matrix(model, alpha)?;
    spectral_measure_of_vector(&u, &model.cyclic_vector_complex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::model::Kind;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn two_atom_selfadjoint() {
        let m = CyclicOperatorModel::new(Kind::Line, vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let unperturbed = matrix_oracle_selfadjoint(&m, 0.0).unwrap();
        for (a, b) in unperturbed
            .atoms()
            .iter()
            .zip(m.line_measure().unwrap().atoms())
        {
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        }
        let mu = matrix_oracle_selfadjoint(&m, 3.0).unwrap();
        let s = 13f64.sqrt();
        assert!((mu.atoms()[0].0 - (3.0 - s) / 2.0).abs() < 1e-14);
        assert!((mu.atoms()[1].0 - (3.0 + s) / 2.0).abs() < 1e-14);
        assert!((mu.total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vector_measures() {
        let id = CMatrix::identity(3, 3);
        let v = linalg::real_to_complex(&[0.6, 0.0, 0.8]);
        let nu = spectral_measure_of_vector(&id, &v).unwrap();
        assert_eq!(nu.len(), 1);
        assert!((nu.total_mass() - 1.0).abs() < 1e-14);

        let d = CMatrix::from_diagonal(&linalg::real_to_complex(&[1.0, -1.0]));
        let v = linalg::real_to_complex(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let nu = spectral_measure_of_vector(&d, &v).unwrap();
        assert!((nu.atoms()[0].0).abs() < 1e-14 && (nu.atoms()[1].0 - PI).abs() < 1e-14);
        assert!((nu.atoms()[0].1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn scalar_unitary_moves_to_alpha() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.0], vec![1.0]).unwrap();
        let alpha = Complex64::from_polar(1.0, 1.2);
        let nu = matrix_oracle_unitary(&m, alpha).unwrap();
        assert!((nu.atoms()[0].0 - 1.2).abs() < 1e-14);
    }
}
