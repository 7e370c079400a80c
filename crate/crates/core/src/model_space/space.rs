use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::BlaschkeProduct;
use crate::linalg::CMatrix;

/// Largest admissible deviation of the grid Gram matrix from the identity.
pub const GRAM_TOLERANCE: f64 = 1e-10;

const INITIAL_GRID: usize = 512;
const MAX_GRID: usize = 1 << 17;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The model space `K_θ = H² ⊖ θH²` of a finite Blaschke product, with the
/// Takenaka–Malmquist orthonormal basis
/// `e_k(z) = √(1 − |a_k|²)/(1 − ā_k z) · Π_{j<k} (z − a_j)/(1 − ā_j z)`.
/// Repeated zeros need no special treatment in this form.
///
/// Boundary inner products use the periodic trapezoid rule on `M` equally
/// spaced points. Basis products are rational with poles at `1/ā_k`, so
/// the rule converges like `max|a_k|^M`; `M` is doubled from 512 until that
/// aliasing term is negligible.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    theta: BlaschkeProduct,
    norms: Vec<f64>,
    grid: Vec<Complex64>,
    /// Basis values on the grid, one row per node.
    basis_on_grid: CMatrix,
    fingerprint: String,
}

/// An element of a model space, by coefficients in its orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelVector {
    #[serde(rename = "theta_fingerprint")]
    fingerprint: String,
    #[serde(with = "complex_pairs")]
    coefficients: Vec<Complex64>,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| [c.re, c.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect())
    }
}

impl ModelVector {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &ModelVector) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> ModelVector {
        ModelVector {
            fingerprint: self.fingerprint.clone(),
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, other: &ModelVector) -> ModelVector {
        ModelVector {
            fingerprint: self.fingerprint.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn max_distance(&self, other: &ModelVector) -> f64 {
        self.sub(other)
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

impl ModelSpace {
    pub fn new(theta: BlaschkeProduct) -> Result<Self> {
        let n = theta.degree();
        if n == 0 {
            return Err(Error::ModelSpace("θ must have degree at least 1".into()));
        }
        let norms = theta
            .zeros()
            .iter()
            .map(|a| (1.0 - a.norm_sqr()).sqrt())
            .collect();
        let r = theta.zeros().iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut m = INITIAL_GRID;
        while m < MAX_GRID && r.powi(m as i32) * (m * m) as f64 >= 1e-17 {
            m *= 2;
        }
        let grid: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / m as f64))
            .collect();
        let fingerprint = theta.fingerprint();
        let mut space = Self {
            theta,
            norms,
            grid,
            basis_on_grid: CMatrix::zeros(0, 0),
            fingerprint,
        };
        let mut e = CMatrix::zeros(m, n);
        for (row, &xi) in space.grid.iter().enumerate() {
            for (col, v) in space.basis_at(xi)?.into_iter().enumerate() {
                e[(row, col)] = v;
            }
        }
        space.basis_on_grid = e;
        let defect = space.gram_defect();
        if !(defect <= GRAM_TOLERANCE) {
            return Err(Error::ModelSpace(format!(
                "basis Gram matrix deviates from identity by {defect:e} on {m} nodes"
            )));
        }
        Ok(space)
    }

    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.norms.len()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn grid_size(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[Complex64] {
        &self.grid
    }

    /// `(e_0(z), …, e_{N−1}(z))`.
    pub fn basis_at(&self, z: Complex64) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.dim());
        let mut prefix = ONE;
        for (&a, &norm) in self.theta.zeros().iter().zip(&self.norms) {
            let d = ONE - a.conj() * z;
            if d == Complex64::new(0.0, 0.0) {
                return Err(Error::Pole(z));
            }
            out.push(prefix * norm / d);
            prefix *= (z - a) / d;
        }
        Ok(out)
    }

    /// `max |⟨e_j, e_k⟩ − δ_jk|` on the quadrature grid.
    pub fn gram_defect(&self) -> f64 {
        let e = &self.basis_on_grid;
        let gram = e.adjoint() * e / Complex64::new(self.grid.len() as f64, 0.0);
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let want = if r == c {
                    ONE
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((gram[(r, c)] - want).norm());
            }
        }
        worst
    }

    /// `max |⟨e_k, θ z^j⟩|` over `j ≤ N`: orthogonality to `θH²`.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = self.grid.len() as f64;
        let mut worst = 0.0f64;
        for j in 0..=self.dim() {
            let w: Vec<Complex64> = self
                .grid
                .iter()
                .map(|&xi| self.theta.eval(xi).expect("boundary") * xi.powu(j as u32))
                .collect();
            for k in 0..self.dim() {
                let ip: Complex64 = (0..self.grid.len())
                    .map(|r| self.basis_on_grid[(r, k)] * w[r].conj())
                    .sum::<Complex64>()
                    / m;
                worst = worst.max(ip.norm());
            }
        }
        worst
    }

    pub fn vector(&self, coefficients: Vec<Complex64>) -> Result<ModelVector> {
        if coefficients.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a {}-dimensional model space",
                coefficients.len(),
                self.dim()
            )));
        }
        Ok(ModelVector {
            fingerprint: self.fingerprint.clone(),
            coefficients,
        })
    }

    pub fn zero_vector(&self) -> ModelVector {
        ModelVector {
            fingerprint: self.fingerprint.clone(),
            coefficients: vec![Complex64::new(0.0, 0.0); self.dim()],
        }
    }

    /// Rejects vectors whose coordinates refer to a different basis.
    pub fn check(&self, f: &ModelVector) -> Result<()> {
        if f.fingerprint != self.fingerprint {
            return Err(Error::Fingerprint {
                expected: self.fingerprint.clone(),
                found: f.fingerprint.clone(),
            });
        }
        if f.coefficients.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector has {} coefficients, space has dimension {}",
                f.coefficients.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, f: &ModelVector, z: Complex64) -> Result<Complex64> {
        self.check(f)?;
        Ok(self
            .basis_at(z)?
            .iter()
            .zip(&f.coefficients)
            .map(|(e, c)| e * c)
            .sum())
    }

    /// Values of `f` on the quadrature grid.
    pub fn values_on_grid(&self, f: &ModelVector) -> Result<Vec<Complex64>> {
        self.check(f)?;
        let c = crate::linalg::cvector(&f.coefficients);
        Ok((&self.basis_on_grid * c).iter().copied().collect())
    }

    /// Orthogonal projection onto `K_θ` of a boundary function given by its
    /// values on the grid.
    pub fn project_grid_values(&self, values: &[Complex64]) -> Result<ModelVector> {
        if values.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "{} grid values for {} nodes",
                values.len(),
                self.grid.len()
            )));
        }
        let v = crate::linalg::cvector(values);
        let c = self.basis_on_grid.adjoint() * v / Complex64::new(self.grid.len() as f64, 0.0);
        self.vector(c.iter().copied().collect())
    }

    /// Orthogonal projection onto `K_θ` of a boundary function.
    pub fn project(&self, f: impl Fn(Complex64) -> Complex64) -> Result<ModelVector> {
        let values: Vec<Complex64> = self.grid.iter().map(|&xi| f(xi)).collect();
        self.project_grid_values(&values)
    }

    /// Projection using the grid rotated by `offset` radians; used for
    /// integrands with removable singularities that may fall on a node.
    pub fn project_rotated(
        &self,
        f: impl Fn(Complex64) -> Complex64,
        offset: f64,
    ) -> Result<ModelVector> {
        let rot = Complex64::from_polar(1.0, offset);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.dim()];
        for &node in &self.grid {
            let xi = node * rot;
            let v = f(xi);
            for (a, e) in acc.iter_mut().zip(self.basis_at(xi)?) {
                *a += e.conj() * v;
            }
        }
        let m = self.grid.len() as f64;
        self.vector(acc.into_iter().map(|a| a / m).collect())
    }

    pub(crate) fn basis_on_grid(&self) -> &CMatrix {
        &self.basis_on_grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_spaces_have_power_bases() {
        let ms = ModelSpace::new(BlaschkeProduct::monomial(1, ONE).unwrap()).unwrap();
        assert_eq!(ms.dim(), 1);
        assert_eq!(ms.basis_at(c(0.3, 0.1)).unwrap(), vec![ONE]);
        let ms = ModelSpace::new(BlaschkeProduct::monomial(2, ONE).unwrap()).unwrap();
        let z = c(0.3, 0.1);
        let b = ms.basis_at(z).unwrap();
        assert_eq!(b[0], ONE);
        assert_eq!(b[1], z);
    }

    #[test]
    fn general_basis_is_orthonormal() {
        let theta = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.0)], ONE).unwrap();
        let ms = ModelSpace::new(theta).unwrap();
        assert!(ms.gram_defect() < 1e-12);
        assert!(ms.orthogonality_defect() < 1e-12);

        let repeated = BlaschkeProduct::new(vec![c(0.3, 0.4); 3], ONE).unwrap();
        let ms = ModelSpace::new(repeated).unwrap();
        assert!(ms.gram_defect() < 1e-12);
        assert!(ms.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn grid_grows_with_zero_modulus() {
        let near = BlaschkeProduct::new(vec![c(0.97, 0.0)], ONE).unwrap();
        let ms = ModelSpace::new(near).unwrap();
        assert!(ms.grid_size() > 512);
        assert!(ms.gram_defect() < 1e-12);
    }

    #[test]
    fn projection_reproduces_members() {
        let theta =
            BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.2, -0.6), c(-0.4, 0.1)], ONE).unwrap();
        let ms = ModelSpace::new(theta).unwrap();
        let f = ms
            .vector(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0)])
            .unwrap();
        let g = ms.project(|xi| ms.eval(&f, xi).unwrap()).unwrap();
        assert!(g.max_distance(&f) < 1e-14);
        // θ itself is orthogonal to K_θ
        let t = ms.project(|xi| ms.theta().eval(xi).unwrap()).unwrap();
        assert!(t.norm() < 1e-14);
    }

    #[test]
    fn fingerprints_guard_bases() {
        let a = ModelSpace::new(BlaschkeProduct::monomial(2, ONE).unwrap()).unwrap();
        let b = ModelSpace::new(BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.0)], ONE).unwrap())
            .unwrap();
        let f = a.vector(vec![ONE, ONE]).unwrap();
        assert!(matches!(b.eval(&f, ONE), Err(Error::Fingerprint { .. })));
        let text = serde_json::to_string(&f).unwrap();
        let back: ModelVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(text.contains("theta_fingerprint"));
    }
}
