use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::rank_one::model::{CyclicOperatorModel, Kind};
use crate::rank_one::oracle::unitary_perturbation;

/// Unit-norm tolerance on the perturbation vectors.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Relative threshold of the Krylov rank test.
pub const CYCLICITY_TOLERANCE: f64 = 1e-10;
/// Largest admissible `‖U*U − I‖` at every stage of the recursion.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A diagonal unitary `U` with vectors `φ₁, …, φₙ`, each cyclic for `U`.
#[derive(Debug, Clone)]
pub struct RankNPerturbationFamily {
    base: CyclicOperatorModel,
    u: CMatrix,
    vectors: Vec<CVector>,
}

fn check_cyclic(u: &CMatrix, v: &CVector, index: usize) -> Result<()> {
    let dim = u.nrows();
    let rank = linalg::krylov_rank(u, v, CYCLICITY_TOLERANCE);
    if rank < dim {
        return Err(Error::NotCyclic { index, rank, dim });
    }
    Ok(())
}

impl RankNPerturbationFamily {
    pub fn new(base: CyclicOperatorModel, vectors: Vec<CVector>) -> Result<Self> {
        if base.kind() != Kind::Circle {
            return Err(Error::InvalidModel(
                "rank-n families need a circle base model".into(),
            ));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidModel("no perturbation vectors".into()));
        }
        let u = base.unitary_matrix()?;
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != base.dim() {
                return Err(Error::Dimension(format!(
                    "vector {k} has length {} but the base has dimension {}",
                    v.len(),
                    base.dim()
                )));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "vector {k} has norm {norm}, not 1"
                )));
            }
            check_cyclic(&u, v, k)?;
        }
        Ok(Self { base, u, vectors })
    }

    pub fn base(&self) -> &CyclicOperatorModel {
        &self.base
    }

    pub fn base_matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    fn check_point(&self, alpha: &[Complex64]) -> Result<()> {
        if alpha.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "point of 𝕋^{} for a rank-{} family",
                alpha.len(),
                self.rank()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| (a.norm() - 1.0).abs() > 1e-10) {
            return Err(Error::Domain {
                point: *a,
                reason: "perturbation parameters must be unimodular",
            });
        }
        Ok(())
    }

    /// `U_{αᵏ} = U_{αᵏ⁻¹} + (α_k − 1)(·, U_{αᵏ⁻¹}⁻¹φ_k)φ_k`, starting from
    /// `U`. Each stage is checked for unitarity and for cyclicity of the
    /// vector about to be used.
    pub fn recursive_unitary(&self, alpha: &[Complex64]) -> Result<CMatrix> {
        self.check_point(alpha)?;
        let mut u = self.u.clone();
        for (k, (&a, phi)) in alpha.iter().zip(&self.vectors).enumerate() {
            if k > 0 {
                check_cyclic(&u, phi, k)?;
            }
            u = unitary_perturbation(&u, phi, a);
            let residual = linalg::unitarity_residual(&u);
            if !(residual <= UNITARITY_TOLERANCE) {
                return Err(Error::Eigensolver(format!(
                    "stage {k} of the recursion is not unitary (residual {residual:e})"
                )));
            }
        }
        Ok(u)
    }

    /// `U + Σ (α_k − 1)(·, U⁻¹φ_k)φ_k`, which agrees with the recursion when
    /// the `φ_k` are pairwise orthogonal.
    pub fn orthogonal_sum(&self, alpha: &[Complex64]) -> Result<CMatrix> {
        self.check_point(alpha)?;
        let uinv = self.u.adjoint();
        let mut out = self.u.clone();
        for (&a, phi) in alpha.iter().zip(&self.vectors) {
            let w = &uinv * phi;
            out += phi * w.adjoint() * (a - ONE);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_one::oracle::unitary_matrix;

    fn base() -> CyclicOperatorModel {
        CyclicOperatorModel::new(Kind::Circle, vec![0.3, 2.0, 4.1], vec![0.2, 0.5, 0.3]).unwrap()
    }

    #[test]
    fn rank_one_base_case() {
        let m = base();
        let f = RankNPerturbationFamily::new(m.clone(), vec![m.cyclic_vector_complex()]).unwrap();
        let a = Complex64::from_polar(1.0, 1.7);
        let want = unitary_matrix(&m, a).unwrap();
        assert!(linalg::spectral_norm(&(f.recursive_unitary(&[a]).unwrap() - want)) < 1e-14);
        let id = f.recursive_unitary(&[ONE]).unwrap();
        assert!(linalg::spectral_norm(&(id - f.base_matrix())) < 1e-15);
    }

    #[test]
    fn rejects_bad_vectors() {
        let m = base();
        let e1 = linalg::real_to_complex(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            RankNPerturbationFamily::new(m.clone(), vec![e1]),
            Err(Error::NotCyclic { index: 0, .. })
        ));
        let long = linalg::real_to_complex(&[1.0, 1.0, 1.0]);
        assert!(RankNPerturbationFamily::new(m, vec![long]).is_err());
    }

    #[test]
    fn orthogonal_vectors_collapse_to_a_sum() {
        let m = CyclicOperatorModel::new(Kind::Circle, vec![0.1, 1.5, 3.0, 4.4], vec![0.25; 4])
            .unwrap();
        let h = 0.5;
        let v1 = linalg::real_to_complex(&[h, h, h, h]);
        let v2 = linalg::cvector(&[
            Complex64::new(h, 0.0),
            Complex64::new(0.0, h),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, -h),
        ]);
        assert!(v1.dotc(&v2).norm() < 1e-15);
        let f = RankNPerturbationFamily::new(m, vec![v1, v2]).unwrap();
        for j in 0..6 {
            let a = [
                Complex64::from_polar(1.0, 0.9 * j as f64),
                Complex64::from_polar(1.0, -1.3 * j as f64 + 0.4),
            ];
            let r = f.recursive_unitary(&a).unwrap();
            let s = f.orthogonal_sum(&a).unwrap();
            assert!(linalg::spectral_norm(&(r - s)) < 1e-10);
        }
    }
}
