use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Tolerance on `|c| = 1`.
pub const CONSTANT_TOLERANCE: f64 = 1e-12;
/// Boundary modulus tolerance checked at construction.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;
/// Level-set acceptance: `|θ(ξ) − α|` must not exceed this.
pub const LEVEL_SET_TOLERANCE: f64 = 1e-9;
/// Two level-set points closer than this are reported as a multiple root.
pub const COLLISION_TOLERANCE: f64 = 1e-12;

const MAX_POLISH_ITERATIONS: usize = 100;
const BOUNDARY_SAMPLES: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Finite Blaschke product `θ(z) = c·Π (z − aⱼ)/(1 − conj(aⱼ) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    c: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, c: Complex64) -> Result<Self> {
        for &a in &zeros {
            if !(a.norm() < 1.0) {
                return Err(Error::InvalidBlaschke(format!(
                    "zero {a} is not inside the unit disk"
                )));
            }
        }
        if !((c.norm() - 1.0).abs() <= CONSTANT_TOLERANCE) {
            return Err(Error::InvalidBlaschke(format!(
                "front constant {c} is not unimodular"
            )));
        }
        let theta = Self { zeros, c };
        for k in 0..BOUNDARY_SAMPLES {
            let xi = Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / BOUNDARY_SAMPLES as f64);
            let m = theta.eval(xi)?.norm();
            if (m - 1.0).abs() > BOUNDARY_TOLERANCE {
                return Err(Error::InvalidBlaschke(format!(
                    "boundary modulus {m} at {xi}"
                )));
            }
        }
        Ok(theta)
    }

    /// `c·z^n`.
    pub fn monomial(n: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![ZERO; n], c)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.c
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.c;
        for &a in &self.zeros {
            let d = ONE - a.conj() * z;
            if d == ZERO {
                return Err(Error::Pole(z));
            }
            acc *= (z - a) / d;
        }
        Ok(acc)
    }

    /// `θ′(z)` by the product rule over the factors (well defined at the
    /// zeros of θ, unlike the logarithmic derivative).
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let n = self.zeros.len();
        let mut factors = Vec::with_capacity(n);
        let mut dfactors = Vec::with_capacity(n);
        for &a in &self.zeros {
            let d = ONE - a.conj() * z;
            if d == ZERO {
                return Err(Error::Pole(z));
            }
            factors.push((z - a) / d);
            dfactors.push(Complex64::new(1.0 - a.norm_sqr(), 0.0) / (d * d));
        }
        // suffix[j] = Π_{k ≥ j} factors[k]
        let mut suffix = vec![ONE; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] * factors[j];
        }
        let mut prefix = ONE;
        let mut acc = ZERO;
        for j in 0..n {
            acc += prefix * dfactors[j] * suffix[j + 1];
            prefix *= factors[j];
        }
        Ok(self.c * acc)
    }

    pub fn at_origin(&self) -> Complex64 {
        self.zeros.iter().fold(self.c, |acc, &a| -acc * a)
    }

    /// Continuous branch of `arg θ(e^{is})`, strictly increasing with total
    /// increase `2πN` over one turn.
    pub fn boundary_phase(&self, s: f64) -> f64 {
        let mut phi = self.c.arg() + self.zeros.len() as f64 * s;
        for &a in &self.zeros {
            let (r, beta) = a.to_polar();
            let u = s - beta;
            phi += 2.0 * (r * u.sin()).atan2(1.0 - r * u.cos());
        }
        phi
    }

    /// `d/ds arg θ(e^{is}) = Σ (1 − |aⱼ|²)/|e^{is} − aⱼ|²`, which equals
    /// `|θ′(e^{is})|`.
    pub fn phase_derivative(&self, s: f64) -> f64 {
        let xi = Complex64::from_polar(1.0, s);
        self.zeros
            .iter()
            .map(|&a| (1.0 - a.norm_sqr()) / (xi - a).norm_sqr())
            .sum()
    }

    /// `P(z) = c·Π (z − aⱼ)` and `Q(z) = Π (1 − conj(aⱼ) z)` with `θ = P/Q`.
    pub fn polynomials(&self) -> (Poly, Poly) {
        let p = Poly::from_roots(&self.zeros).scale(self.c);
        let q = self.zeros.iter().fold(Poly::constant(ONE), |acc, &a| {
            &acc * &Poly::linear(ONE, -a.conj())
        });
        (p, q)
    }

    /// Angles in `[0, 2π)`, ascending, of the `N` boundary points with
    /// `θ(ξ) = α`.
    ///
    /// Companion-matrix roots of `P − αQ` seed a safeguarded Newton iteration
    /// on the unwrapped boundary phase; the `k`-th solution is the unique
    /// `s` with `Φ(s) = arg α + 2πk` in the branch range. Branches that no
    /// seed lands on are solved from the global bracket.
    pub fn level_set_angles(&self, alpha: Complex64) -> Result<Vec<f64>> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::InvalidBlaschke(
                "constant θ has no level sets".into(),
            ));
        }
        if (alpha.norm() - 1.0).abs() > crate::measures::UNIMODULAR_TOLERANCE {
            return Err(Error::Domain {
                point: alpha,
                reason: "level value must be unimodular",
            });
        }
        let phi0 = self.boundary_phase(0.0);
        let a = alpha.arg();
        let t0 = a + TAU * ((phi0 - a) / TAU).ceil();
        let target = |k: usize| t0 + TAU * k as f64;

        let (p, q) = self.polynomials();
        let seeds = (&p - &q.scale(alpha)).roots().unwrap_or_default();
        let mut seeded: Vec<Option<(f64, f64)>> = vec![None; n];
        for z in seeds {
            if !(z.re.is_finite() && z.im.is_finite()) || z == ZERO {
                continue;
            }
            let mut s = z.arg().rem_euclid(TAU);
            let mut k = ((self.boundary_phase(s) - t0) / TAU).round();
            if k >= n as f64 {
                k = 0.0;
                s = 0.0;
            }
            let k = k.max(0.0) as usize;
            let miss = (self.boundary_phase(s) - target(k)).abs();
            if seeded[k].is_none_or(|(_, best)| miss < best) {
                seeded[k] = Some((s, miss));
            }
        }

        let mut angles = Vec::with_capacity(n);
        for (k, seed) in seeded.iter().enumerate() {
            angles.push(self.solve_phase(target(k), seed.map(|(s, _)| s))?);
        }
        for w in angles.windows(2) {
            if w[1] - w[0] < COLLISION_TOLERANCE {
                return Err(Error::CriticalValue {
                    value: alpha,
                    multiplicity: 2,
                });
            }
        }
        if n > 1 && angles[0] + TAU - angles[n - 1] < COLLISION_TOLERANCE {
            return Err(Error::CriticalValue {
                value: alpha,
                multiplicity: 2,
            });
        }
        for &s in &angles {
            let xi = Complex64::from_polar(1.0, s);
            let residual = (self.eval(xi)? - alpha).norm();
            if residual > LEVEL_SET_TOLERANCE {
                return Err(Error::RootPolish {
                    near: xi,
                    iterations: MAX_POLISH_ITERATIONS,
                    residual,
                });
            }
        }
        Ok(angles)
    }

    /// Points of `{ξ ∈ 𝕋 : θ(ξ) = α}`, sorted by angle.
    pub fn level_set(&self, alpha: Complex64) -> Result<Vec<Complex64>> {
        Ok(self
            .level_set_angles(alpha)?
            .into_iter()
            .map(|s| Complex64::from_polar(1.0, s))
            .collect())
    }

    /// Solves `Φ(s) = t` on `[0, 2π]`, where `Φ(0) ≤ t < Φ(2π)`.
    fn solve_phase(&self, t: f64, start: Option<f64>) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, TAU);
        let mut s = start.unwrap_or(PI).clamp(lo, hi);
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_POLISH_ITERATIONS {
            residual = self.boundary_phase(s) - t;
            if residual == 0.0 {
                return Ok(s);
            }
            if residual < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let step = residual / self.phase_derivative(s);
            let next = s - step;
            let next = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if (next - s).abs() <= 2.0 * f64::EPSILON * s.abs().max(1.0)
                || hi - lo <= 4.0 * f64::EPSILON * TAU
            {
                return Ok(next.rem_euclid(TAU));
            }
            s = next;
        }
        Err(Error::RootPolish {
            near: Complex64::from_polar(1.0, s),
            iterations: MAX_POLISH_ITERATIONS,
            residual: residual.abs(),
        })
    }

    /// Hex SHA-256 of the canonical JSON serialization; tags model-space
    /// coordinates with the basis they belong to.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("serializable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlaschkeRepr {
    zeros: Vec<[f64; 2]>,
    c: [f64; 2],
}

impl Serialize for BlaschkeProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlaschkeRepr {
            zeros: self.zeros.iter().map(|z| [z.re, z.im]).collect(),
            c: [self.c.re, self.c.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlaschkeProduct {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BlaschkeRepr::deserialize(d)?;
        BlaschkeProduct::new(
            repr.zeros
                .iter()
                .map(|z| Complex64::new(z[0], z[1]))
                .collect(),
            Complex64::new(repr.c[0], repr.c[1]),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> BlaschkeProduct {
        BlaschkeProduct::new(
            vec![c(0.0, 0.0), c(0.5, 0.2), c(-0.3, 0.7), c(0.9, -0.1)],
            Complex64::from_polar(1.0, 0.4),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        assert_eq!(z.eval(c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
        let z2 = BlaschkeProduct::monomial(2, ONE).unwrap();
        assert!((z2.eval(c(0.0, 0.5)).unwrap() - c(-0.25, 0.0)).norm() < 1e-16);
        let theta = sample();
        for k in 0..17 {
            let xi = Complex64::from_polar(1.0, 0.37 * k as f64);
            assert!((theta.eval(xi).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        assert_eq!(theta.at_origin(), ZERO);
    }

    #[test]
    fn validation() {
        assert!(BlaschkeProduct::new(vec![c(1.0, 0.0)], ONE).is_err());
        assert!(BlaschkeProduct::new(vec![], c(1.1, 0.0)).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let theta = sample();
        let h = 1e-6;
        for z in [
            c(0.1, 0.2),
            c(-0.5, 0.3),
            c(0.5, 0.2),
            Complex64::from_polar(1.0, 2.0),
        ] {
            let fd = (theta.eval(z + h).unwrap() - theta.eval(z - h).unwrap()) / (2.0 * h);
            assert!((theta.derivative(z).unwrap() - fd).norm() < 1e-6 * fd.norm().max(1.0));
        }
    }

    #[test]
    fn phase_is_consistent_with_values() {
        let theta = sample();
        for k in 0..50 {
            let s = TAU * k as f64 / 50.0;
            let xi = Complex64::from_polar(1.0, s);
            let v = theta.eval(xi).unwrap();
            assert!((Complex64::from_polar(1.0, theta.boundary_phase(s)) - v).norm() < 1e-12);
            let dv = theta.derivative(xi).unwrap().norm();
            assert!((theta.phase_derivative(s) - dv).abs() < 1e-10 * dv);
        }
        assert!((theta.boundary_phase(TAU) - theta.boundary_phase(0.0) - 4.0 * TAU).abs() < 1e-12);
    }

    #[test]
    fn level_set_examples() {
        let z = BlaschkeProduct::monomial(1, ONE).unwrap();
        let l = z.level_set(ONE).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0] - ONE).norm() < 1e-15);

        let z2 = BlaschkeProduct::monomial(2, ONE).unwrap();
        let l = z2.level_set(ONE).unwrap();
        assert!((l[0] - ONE).norm() < 1e-15 && (l[1] + ONE).norm() < 1e-15);

        let l = z2.level_set(c(0.0, 1.0)).unwrap();
        assert!((l[0] - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert!((l[1] - Complex64::from_polar(1.0, 5.0 * PI / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn level_sets_of_general_product() {
        let theta = sample();
        let mut previous: Vec<Complex64> = Vec::new();
        for k in 0..32 {
            let alpha = Complex64::from_polar(1.0, 0.2 * k as f64 - 3.0);
            let l = theta.level_set(alpha).unwrap();
            assert_eq!(l.len(), 4);
            for xi in &l {
                assert!((theta.eval(*xi).unwrap() - alpha).norm() < 1e-12);
            }
            for a in &l {
                for b in &previous {
                    assert!((a - b).norm() > 1e-9);
                }
            }
            previous = l;
        }
    }

    #[test]
    fn level_set_branch_at_angle_zero() {
        let theta = sample();
        let alpha = theta.eval(ONE).unwrap();
        let l = theta.level_set_angles(alpha).unwrap();
        assert!(l[0].abs() < 1e-12 || (TAU - l[3]).abs() < 1e-12);
    }

    #[test]
    fn serde_and_fingerprint() {
        let theta = sample();
        let text = serde_json::to_string(&theta).unwrap();
        let back: BlaschkeProduct = serde_json::from_str(&text).unwrap();
        assert_eq!(back, theta);
        assert_eq!(back.fingerprint(), theta.fingerprint());
        assert_ne!(
            theta.fingerprint(),
            BlaschkeProduct::monomial(1, ONE).unwrap().fingerprint()
        );
        assert!(serde_json::from_str::<BlaschkeProduct>(r#"{"zeros":[[2,0]],"c":[1,0]}"#).is_err());
    }
}
