//! Seeded generators. Every random object in a run derives from the
//! scenario seed through a ChaCha stream per check, so results do not
//! depend on scheduling.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::herglotz::BlaschkeProduct;
use crate::model_space::{ModelSpace, ModelVector};
use crate::rank_one::model::{CyclicOperatorModel, Kind};

/// Largest modulus of randomly drawn Blaschke zeros.
pub const MAX_ZERO_MODULUS: f64 = 0.85;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `N` sorted points with consecutive gaps `≥ δ` in `[lo, lo + length]`
/// (gap method: draw in the slack, then add `kδ`).
fn separated_points<R: Rng>(rng: &mut R, n: usize, lo: f64, length: f64, delta: f64) -> Vec<f64> {
    let slack = length - delta * (n as f64);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * slack).collect();
    u.sort_by(f64::total_cmp);
    u.iter()
        .enumerate()
        .map(|(k, v)| lo + v + delta * k as f64)
        .collect()
}

/// Symmetric Dirichlet(1) weights: normalized Exp(1) draws.
fn dirichlet_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Random cyclic model with site separation `≥ 1/(4N)`: sites in `[−1, 1]`
/// for the line, angles in `[0, 2π)` for the circle.
pub fn random_model_with<R: Rng>(rng: &mut R, n: usize, kind: Kind) -> Result<CyclicOperatorModel> {
    let n = n.max(1);
    let delta = 1.0 / (4.0 * n as f64);
    let sites = match kind {
        // n − 1 gaps inside [−1, 1]
        Kind::Line => separated_points(rng, n, -1.0, 2.0 + delta, delta),
        // n gaps around the circle, including the wrap-around one
        Kind::Circle => separated_points(rng, n, 0.0, TAU, delta),
    };
    let weights = if n == 1 {
        vec![1.0]
    } else {
        dirichlet_weights(rng, n)
    };
    CyclicOperatorModel::new(kind, sites, weights)
}

pub fn random_model(seed: u64, n: usize, kind: Kind) -> Result<CyclicOperatorModel> {
    random_model_with(&mut ChaCha8Rng::seed_from_u64(seed), n, kind)
}

pub fn random_unimodular<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, TAU * rng.random::<f64>())
}

/// Point of the disk with `|z| ≤ radius`, uniform in area.
pub fn random_disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::from_polar(
        radius * rng.random::<f64>().sqrt(),
        TAU * rng.random::<f64>(),
    )
}

/// Random Blaschke product of the given degree; the first zero is `0` when
/// `vanish_at_origin`.
pub fn random_blaschke<R: Rng>(
    rng: &mut R,
    degree: usize,
    vanish_at_origin: bool,
) -> Result<BlaschkeProduct> {
    let zeros = (0..degree)
        .map(|k| {
            if k == 0 && vanish_at_origin {
                Complex64::new(0.0, 0.0)
            } else {
                random_disk_point(rng, MAX_ZERO_MODULUS)
            }
        })
        .collect();
    BlaschkeProduct::new(zeros, random_unimodular(rng))
}

/// Gaussian coefficients normalized to a unit vector; with
/// `vanish_at_origin` the component along the reproducing kernel at `0` is
/// removed first.
pub fn random_unit_vector<R: Rng>(
    rng: &mut R,
    ms: &ModelSpace,
    vanish_at_origin: bool,
) -> Result<ModelVector> {
    let mut c: Vec<Complex64> = (0..ms.dim())
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    if vanish_at_origin {
        // k₀ = Σ conj(e_k(0)) e_k and f(0) = ⟨f, k₀⟩
        let k0: Vec<Complex64> = ms
            .basis_at(Complex64::new(0.0, 0.0))?
            .iter()
            .map(|e| e.conj())
            .collect();
        let kk: f64 = k0.iter().map(|v| v.norm_sqr()).sum();
        let f0: Complex64 = c.iter().zip(&k0).map(|(a, b)| a * b.conj()).sum();
        for (a, b) in c.iter_mut().zip(&k0) {
            *a -= b * f0 / kk;
        }
    }
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    ms.vector(c.into_iter().map(|v| v / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_are_deterministic_and_separated() {
        let a = random_model(7, 64, Kind::Line).unwrap();
        let b = random_model(7, 64, Kind::Line).unwrap();
        assert_eq!(a, b);
        let s = a.sites();
        assert!(s.windows(2).all(|w| w[1] - w[0] >= 1.0 / 256.0 - 1e-15));
        assert!(s[0] >= -1.0 && s[63] <= 1.0 + 1e-15);

        let c = random_model(9, 64, Kind::Circle).unwrap();
        let s = c.sites();
        assert!(s.windows(2).all(|w| w[1] - w[0] >= 1.0 / 256.0 - 1e-15));
        assert!(TAU - s[63] + s[0] >= 1.0 / 256.0 - 1e-15);

        let one = random_model(3, 1, Kind::Circle).unwrap();
        assert_eq!(one.weights(), &[1.0]);
    }

    #[test]
    fn unit_vectors_vanish_at_origin() {
        let mut rng = rng_for(1, 2);
        let theta = random_blaschke(&mut rng, 6, false).unwrap();
        let ms = ModelSpace::new(theta).unwrap();
        let f = random_unit_vector(&mut rng, &ms, true).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-14);
        assert!(ms.eval(&f, Complex64::new(0.0, 0.0)).unwrap().norm() < 1e-14);
    }
}
