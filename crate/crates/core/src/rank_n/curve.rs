use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::BlaschkeProduct;

/// `γ = (I₁, …, Iₙ)`, a curve in `𝕋ⁿ` parametrized by nonconstant finite
/// Blaschke products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BlaschkeProduct>", into = "Vec<BlaschkeProduct>")]
pub struct AnalyticCurve {
    components: Vec<BlaschkeProduct>,
}

impl TryFrom<Vec<BlaschkeProduct>> for AnalyticCurve {
    type Error = Error;

    fn try_from(components: Vec<BlaschkeProduct>) -> Result<Self> {
        Self::new(components)
    }
}

impl From<AnalyticCurve> for Vec<BlaschkeProduct> {
    fn from(c: AnalyticCurve) -> Self {
        c.components
    }
}

impl AnalyticCurve {
    pub fn new(components: Vec<BlaschkeProduct>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidBlaschke(
                "a curve needs at least one component".into(),
            ));
        }
        if let Some(k) = components.iter().position(|b| b.degree() == 0) {
            return Err(Error::InvalidBlaschke(format!(
                "curve component {k} is constant"
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[BlaschkeProduct] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `(I₁(0), …, Iₙ(0))`.
    pub fn at_origin(&self) -> Vec<Complex64> {
        self.components.iter().map(|b| b.at_origin()).collect()
    }

    /// `γ(ξ) = (I₁(ξ), …, Iₙ(ξ))` for `|ξ| = 1`.
    pub fn sample(&self, xi: Complex64) -> Result<Vec<Complex64>> {
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                point: xi,
                reason: "curves are sampled on the unit circle",
            });
        }
        self.components.iter().map(|b| b.eval(xi)).collect()
    }
}

pub fn curve_sample(curve: &AnalyticCurve, xi: Complex64) -> Result<Vec<Complex64>> {
    curve.sample(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn sampling() {
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let z2 = BlaschkeProduct::monomial(2, ONE).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let g = AnalyticCurve::new(vec![z.clone(), z.clone()]).unwrap();
        assert_eq!(g.sample(i).unwrap(), vec![i, i]);

        let g = AnalyticCurve::new(vec![z, z2]).unwrap();
        let xi = Complex64::from_polar(1.0, PI / 3.0);
        let s = g.sample(xi).unwrap();
        assert!((s[1] - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);
        assert!(s.iter().all(|v| (v.norm() - 1.0).abs() < 1e-10));
        assert!(g.sample(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn rejects_constants() {
        assert!(AnalyticCurve::new(vec![]).is_err());
        assert!(AnalyticCurve::new(vec![BlaschkeProduct::new(vec![], ONE).unwrap()]).is_err());
    }
}
