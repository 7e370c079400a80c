use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::measures::{CircleAtomicMeasure, LineAtomicMeasure};

/// Relative tolerance for detecting a shared numerator/denominator root.
pub const REDUCED_FORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Partial-fraction data `c + Σ rⱼ / (z − pⱼ)` with simple poles.
///
/// Cauchy transforms of atomic measures are born in this form, and
/// evaluating it is far better conditioned near the poles than a ratio of
/// expanded coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleForm {
    pub constant: Complex64,
    pub terms: Vec<(Complex64, Complex64)>,
}

impl PoleForm {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.constant;
        for &(p, r) in &self.terms {
            let d = z - p;
            if d == ZERO {
                return Err(Error::Pole(z));
            }
            acc += r / d;
        }
        Ok(acc)
    }

    fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = ZERO;
        for &(p, r) in &self.terms {
            let d = z - p;
            if d == ZERO {
                return Err(Error::Pole(z));
            }
            acc -= r / (d * d);
        }
        Ok(acc)
    }

    fn to_coefficients(&self) -> (Poly, Poly) {
        let poles: Vec<Complex64> = self.terms.iter().map(|t| t.0).collect();
        let den = Poly::from_roots(&poles);
        let mut num = den.scale(self.constant);
        for (j, &(_, r)) in self.terms.iter().enumerate() {
            let others: Vec<Complex64> = poles
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &p)| p)
                .collect();
            num = &num + &Poly::from_roots(&others).scale(r);
        }
        (num, den)
    }
}

/// A rational function `num / den` in reduced form with
/// `deg num ≤ deg den`: the exact representation of every Cauchy transform
/// of a finite atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzRational {
    num: Poly,
    den: Poly,
    poles: Option<PoleForm>,
}

impl HerglotzRational {
    /// Builds `num / den`, rejecting common roots (relative residual below
    /// [`REDUCED_FORM_TOLERANCE`]) and numerators of higher degree.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidRational("zero denominator".into()));
        }
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(Error::InvalidRational(format!(
                "numerator degree {} exceeds denominator degree {}",
                num.degree(),
                den.degree()
            )));
        }
        if num.is_zero() && den.degree() > 0 {
            return Err(Error::InvalidRational(
                "zero function must be written as 0/1".into(),
            ));
        }
        for r in den.roots()? {
            let scale = num.eval_scale(r);
            let residual = num.eval(r).norm();
            if residual <= REDUCED_FORM_TOLERANCE * scale {
                return Err(Error::CommonRoot {
                    root: r,
                    residual: if scale > 0.0 { residual / scale } else { 0.0 },
                });
            }
        }
        Ok(Self {
            num,
            den,
            poles: None,
        })
    }

    /// Builds `c + Σ rⱼ/(z − pⱼ)`; poles must be distinct, residues nonzero.
    pub fn from_poles(constant: Complex64, terms: Vec<(Complex64, Complex64)>) -> Result<Self> {
        for (i, &(p, r)) in terms.iter().enumerate() {
            if r == ZERO || !(r.re.is_finite() && r.im.is_finite()) {
                return Err(Error::InvalidRational(format!("residue {r} at pole {p}")));
            }
            if terms[..i].iter().any(|&(q, _)| q == p) {
                return Err(Error::InvalidRational(format!("repeated pole {p}")));
            }
        }
        let form = PoleForm { constant, terms };
        let (num, den) = form.to_coefficients();
        Ok(Self {
            num,
            den,
            poles: Some(form),
        })
    }

    /// `Kμ(z) = Σ mⱼ/(tⱼ − z)` of a line measure.
    pub fn from_line_measure(mu: &LineAtomicMeasure) -> Self {
        let terms = mu
            .atoms()
            .iter()
            .map(|&(t, m)| (Complex64::new(t, 0.0), Complex64::new(-m, 0.0)))
            .collect();
        Self::from_poles(ZERO, terms).expect("validated measure has distinct atoms")
    }

    /// `Kν(z) = Σ mⱼ/(1 − conj(ξⱼ) z)` of a circle measure.
    pub fn from_disk_measure(nu: &CircleAtomicMeasure) -> Self {
        let terms = nu
            .atoms()
            .iter()
            .map(|&(a, m)| {
                let xi = Complex64::from_polar(1.0, a);
                (xi, -xi * m)
            })
            .collect();
        Self::from_poles(ZERO, terms).expect("validated measure has distinct atoms")
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn pole_form(&self) -> Option<&PoleForm> {
        self.poles.as_ref()
    }

    /// The atoms `(tⱼ, mⱼ)` if this is the Cauchy transform of a positive
    /// line measure (real poles, residues `−mⱼ < 0`, no constant).
    pub fn line_atoms(&self) -> Option<Vec<(f64, f64)>> {
        let form = self.poles.as_ref()?;
        if form.constant != ZERO {
            return None;
        }
        let mut atoms = Vec::with_capacity(form.terms.len());
        for &(p, r) in &form.terms {
            if p.im != 0.0 || r.im != 0.0 || r.re >= 0.0 {
                return None;
            }
            atoms.push((p.re, -r.re));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Some(atoms)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if let Some(form) = &self.poles {
            return form.eval(z);
        }
        let d = self.den.eval(z);
        if d == ZERO {
            return Err(Error::Pole(z));
        }
        Ok(self.num.eval(z) / d)
    }

    /// Value of the derivative, without forming the derivative rational.
    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        if let Some(form) = &self.poles {
            return form.eval_derivative(z);
        }
        let d = self.den.eval(z);
        if d == ZERO {
            return Err(Error::Pole(z));
        }
        let n = self.num.eval(z);
        Ok((self.num.derivative().eval(z) * d - n * self.den.derivative().eval(z)) / (d * d))
    }

    /// Quotient-rule derivative, with the factors shared by a repeated
    /// denominator root cancelled so the result is again reduced.
    pub fn derivative(&self) -> Result<Self> {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let den = &self.den * &self.den;
        if num.is_zero() {
            return Ok(Self {
                num: Poly::zero(),
                den: Poly::constant(ONE),
                poles: None,
            });
        }
        let (num, den) = cancel_common_roots(num, den)?;
        Self::new(num, den)
    }

    /// Equivalent form with a monic denominator and negligible leading
    /// numerator terms removed; used to compare coefficient lists.
    pub fn normalized(&self) -> Self {
        let lead = self.den.leading();
        let den = self.den.scale(ONE / lead);
        let num = self.num.scale(ONE / lead).trimmed(1e-13);
        Self {
            num,
            den,
            poles: self.poles.clone(),
        }
    }

    /// Largest coefficient difference after normalizing both sides.
    pub fn coefficient_distance(&self, other: &Self) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        let diff = |p: &Poly, q: &Poly| {
            let n = p.coeffs().len().max(q.coeffs().len());
            (0..n)
                .map(|k| {
                    let x = p.coeffs().get(k).copied().unwrap_or(ZERO);
                    let y = q.coeffs().get(k).copied().unwrap_or(ZERO);
                    (x - y).norm()
                })
                .fold(0.0, f64::max)
        };
        diff(&a.num, &b.num).max(diff(&a.den, &b.den))
    }
}

/// Divides out every denominator root that is also a numerator root.
fn cancel_common_roots(mut num: Poly, mut den: Poly) -> Result<(Poly, Poly)> {
    loop {
        let mut cancelled = false;
        for r in den.roots()? {
            let scale = num.eval_scale(r);
            if num.eval(r).norm() <= 1e-8 * scale {
                num = num.divide_linear(r).0;
                den = den.divide_linear(r).0;
                cancelled = true;
                break;
            }
        }
        if !cancelled || den.degree() == 0 {
            return Ok((num, den));
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalRepr {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

fn to_pairs(p: &Poly) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Poly {
    Poly::new(v.iter().map(|c| Complex64::new(c[0], c[1])).collect())
}

impl Serialize for HerglotzRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: to_pairs(&self.num),
            den: to_pairs(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HerglotzRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(d)?;
        HerglotzRational::new(from_pairs(&repr.num), from_pairs(&repr.den))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn minus_one_over_z() -> HerglotzRational {
        HerglotzRational::new(Poly::constant(c(-1.0, 0.0)), Poly::monomial(1)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert!((minus_one_over_z().eval(c(0.0, 1.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let f = HerglotzRational::new(
            Poly::constant(c(1.0, 0.0)),
            Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        )
        .unwrap();
        assert_eq!(f.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let g = HerglotzRational::new(
            Poly::monomial(1),
            Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
        )
        .unwrap();
        assert!((g.eval(c(2.0, 0.0)).unwrap() - c(-2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(g.eval(c(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn derivative_examples() {
        let d = minus_one_over_z().derivative().unwrap();
        assert!((d.eval(c(2.0, 0.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(d.denominator().degree(), 2);

        // z² itself is improper, so it only exists as a polynomial.
        assert_eq!(
            Poly::monomial(2).derivative().coeffs(),
            &[c(0.0, 0.0), c(2.0, 0.0)]
        );
        assert!(HerglotzRational::new(Poly::monomial(2), Poly::constant(c(1.0, 0.0))).is_err());

        let inv = HerglotzRational::new(
            Poly::constant(c(1.0, 0.0)),
            Poly::linear(c(1.0, 0.0), c(-1.0, 0.0)),
        )
        .unwrap();
        let d = inv.derivative().unwrap();
        let z = c(0.3, 0.4);
        assert!((d.eval(z).unwrap() - 1.0 / ((1.0 - z) * (1.0 - z))).norm() < 1e-14);
    }

    #[test]
    fn derivative_cancels_repeated_poles() {
        // 1/z² → −2/z³ (not −2z/z⁴)
        let f = HerglotzRational::new(Poly::constant(c(1.0, 0.0)), Poly::monomial(2)).unwrap();
        let d = f.derivative().unwrap().normalized();
        assert_eq!(d.denominator().degree(), 3);
        assert!((d.eval(c(2.0, 0.0)).unwrap() - c(-0.25, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unreduced_and_improper() {
        let shared = HerglotzRational::new(
            Poly::from_roots(&[c(0.5, 0.0)]),
            Poly::from_roots(&[c(0.5, 0.0), c(2.0, 0.0)]),
        );
        assert!(matches!(shared, Err(Error::CommonRoot { .. })));
        assert!(HerglotzRational::new(Poly::monomial(2), Poly::monomial(1)).is_err());
        assert!(HerglotzRational::new(Poly::monomial(1), Poly::zero()).is_err());
    }

    #[test]
    fn measure_transforms_match_direct_sums() {
        let mu = LineAtomicMeasure::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let k = HerglotzRational::from_line_measure(&mu);
        let z = c(0.2, 0.7);
        assert!((k.eval(z).unwrap() - mu.cauchy_transform(z).unwrap()).norm() < 1e-15);
        let coeff_only =
            HerglotzRational::new(k.numerator().clone(), k.denominator().clone()).unwrap();
        assert!((coeff_only.eval(z).unwrap() - k.eval(z).unwrap()).norm() < 1e-14);
        assert_eq!(k.line_atoms().unwrap(), vec![(-1.0, 0.5), (1.0, 0.5)]);

        let nu = CircleAtomicMeasure::new(vec![(0.0, 0.5), (std::f64::consts::PI, 0.5)]).unwrap();
        let k = HerglotzRational::from_disk_measure(&nu);
        assert!((k.eval(z).unwrap() - 1.0 / (1.0 - z * z)).norm() < 1e-14);
        assert!(k.line_atoms().is_none());
    }

    #[test]
    fn serde_round_trip() {
        let k = minus_one_over_z();
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(text, r#"{"num":[[-1.0,0.0]],"den":[[0.0,0.0],[1.0,0.0]]}"#);
        let back: HerglotzRational = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
    }
}
