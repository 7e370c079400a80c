//! Dense linear-algebra helpers on top of nalgebra: the eigen-oracles, norms
//! and residuals used by every cross-check in the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest dimension accepted by the dense oracles.
pub const MAX_DENSE_DIM: usize = 4096;

const SCHUR_EPS: f64 = 1e-15;

/// Iteration budget for the QR-based solvers (nalgebra treats 0 as
/// unbounded, which can spin forever on defective input).
fn max_iterations(n: usize) -> usize {
    200 * n.max(8)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_DIM {
        return Err(Error::Dimension(format!(
            "dense oracle dimension {n} outside 1..={MAX_DENSE_DIM}"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending and
/// eigenvectors as the matching columns.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_dim(m.nrows())?;
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, SCHUR_EPS, max_iterations(n))
        .ok_or_else(|| Error::Eigensolver("symmetric QR iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigendecomposition of a unitary (more generally normal) matrix through
/// the complex Schur form; for a normal matrix the Schur vectors are
/// eigenvectors.
pub fn unitary_eigen(m: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    check_dim(m.nrows())?;
    let n = m.nrows();
    let residual = unitarity_residual(m);
    if residual > 1e-9 {
        return Err(Error::Eigensolver(format!(
            "matrix is not unitary (residual {residual:e})"
        )));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), SCHUR_EPS, max_iterations(n))
        .ok_or_else(|| Error::Eigensolver("complex Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut off = 0.0f64;
    for r in 0..n {
        for c in r + 1..n {
            off = off.max(t[(r, c)].norm());
        }
    }
    if off > 1e-8 {
        return Err(Error::Eigensolver(format!(
            "Schur form is not diagonal (largest off-diagonal {off:e})"
        )));
    }
    let values = (0..n).map(|i| t[(i, i)]).collect();
    Ok((values, q))
}

/// Eigenvalues of a general complex matrix (Schur diagonal).
pub fn general_eigenvalues(m: CMatrix) -> Result<Vec<Complex64>> {
    check_dim(m.nrows())?;
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, SCHUR_EPS, max_iterations(n))
        .ok_or_else(|| Error::Eigensolver("complex Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// `‖M*M − I‖₂`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let g = m.adjoint() * m - CMatrix::identity(n, n);
    spectral_norm(&g)
}

/// Roots of `Σ c_k z^k` (ascending coefficients) as eigenvalues of the
/// companion matrix. Leading coefficients that vanish exactly are dropped,
/// and exact roots at the origin are split off first (their companion block
/// is nilpotent, which QR iteration handles badly).
pub fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == zero {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(Vec::new());
    }
    let low = coeffs[..deg].iter().take_while(|&&c| c == zero).count();
    let mut roots = vec![zero; low];
    let coeffs = &coeffs[low..deg];
    let deg = coeffs.len();
    if deg <= 1 {
        return Ok(roots);
    }
    let n = deg - 1;
    let lead = coeffs[n];
    let mut comp = CMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    roots.extend(general_eigenvalues(comp)?);
    Ok(roots)
}

pub fn cvector(values: &[Complex64]) -> CVector {
    CVector::from_column_slice(values)
}

pub fn real_to_complex(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)))
}

/// Rank of the Krylov space of `(m, v)`, computed by Arnoldi with full
/// reorthogonalization: a new direction counts when its residual exceeds
/// `tol · max(‖m‖₂, 1) · ‖v‖`.
pub fn krylov_rank(m: &CMatrix, v: &CVector, tol: f64) -> usize {
    let n = m.nrows();
    let scale = spectral_norm(m).max(1.0);
    let vnorm = v.norm();
    if vnorm == 0.0 {
        return 0;
    }
    let mut basis: Vec<CVector> = vec![v / Complex64::new(vnorm, 0.0)];
    while basis.len() < n {
        let mut w = m * basis.last().unwrap();
        for _ in 0..2 {
            for q in &basis {
                let h = q.dotc(&w);
                w -= q * h;
            }
        }
        let nw = w.norm();
        if nw <= tol * scale {
            break;
        }
        basis.push(w / Complex64::new(nw, 0.0));
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn companion_recovers_known_roots() {
        // (z − 1)(z + 2)(z − i) = z³ + (1 − i)z² + (−2 − i)z + 2i
        let coeffs = [c(0.0, 2.0), c(-2.0, -1.0), c(1.0, -1.0), c(1.0, 0.0)];
        let mut roots = companion_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let want = [c(-2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (r, w) in roots.iter().zip(want.iter()) {
            assert!((r - w).norm() < 1e-12, "{r} vs {w}");
        }
        assert!(companion_roots(&[c(3.0, 0.0)]).unwrap().is_empty());
        let z3 = companion_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(z3.len(), 3);
        assert_eq!(z3.iter().filter(|r| r.norm() == 0.0).count(), 2);
    }

    #[test]
    fn unitary_eigen_of_diagonal_and_rotation() {
        let d = CMatrix::from_diagonal(&cvector(&[c(0.0, 1.0), c(-1.0, 0.0)]));
        let (vals, vecs) = unitary_eigen(&d).unwrap();
        assert_eq!(vals.len(), 2);
        let recon = &vecs * CMatrix::from_diagonal(&cvector(&vals)) * vecs.adjoint();
        assert!((recon - d).norm() < 1e-14);
        let not_unitary = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(unitary_eigen(&not_unitary).is_err());
    }

    #[test]
    fn symmetric_eigen_is_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (vals, _) = symmetric_eigen(m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn krylov_rank_detects_non_cyclic_vectors() {
        let d = CMatrix::from_diagonal(&cvector(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]));
        let full = cvector(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let partial = cvector(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(krylov_rank(&d, &full, 1e-10), 3);
        assert_eq!(krylov_rank(&d, &partial, 1e-10), 2);
    }
}
