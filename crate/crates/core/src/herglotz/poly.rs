use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b·z`
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![ZERO; degree + 1];
        c[degree] = ONE;
        Self::new(c)
    }

    /// `Π (z − rⱼ)`
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(ONE), |acc, &r| &acc * &Self::linear(-r, ONE))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |z|^k`, the natural scale for rounding errors in `eval`.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `rel · max|c_k|`.
    pub fn trimmed(&self, rel: f64) -> Self {
        let cut = rel * self.max_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Synthetic division by `(z − r)`, returning quotient and remainder.
    pub fn divide_linear(&self, r: Complex64) -> (Self, Complex64) {
        if self.coeffs.is_empty() {
            return (Self::zero(), ZERO);
        }
        let n = self.coeffs.len();
        let mut q = vec![ZERO; n - 1];
        let mut carry = ZERO;
        for k in (0..n).rev() {
            let v = self.coeffs[k] + carry * r;
            if k == 0 {
                return (Self::new(q), v);
            }
            q[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// Roots via companion-matrix eigenvalues.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        linalg::companion_roots(&self.coeffs)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(ZERO)
                        + rhs.coeffs.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
