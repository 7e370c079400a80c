//! Library results against values computed here from first principles.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use clark_lab::herglotz::BlaschkeProduct;
use clark_lab::linalg::CMatrix;
use clark_lab::model_space::{t_alpha_matrix, ModelSpace};
use clark_lab::quadrature::{
    gauss_kronrod, periodic_trapezoid, GaussKronrodConfig, TrapezoidConfig,
};
use clark_lab::random::random_model;
use clark_lab::rank_n::{AnalyticCurve, RankTwoSetup};
use clark_lab::rank_one::{
    clark_measure, perturb_selfadjoint, perturb_unitary, CyclicOperatorModel, Kind,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn blaschke(zeros: &[Complex64], z: Complex64) -> Complex64 {
    zeros
        .iter()
        .map(|&a| (z - a) / (ONE - a.conj() * z))
        .product()
}

#[test]
fn selfadjoint_perturbation_matches_hand_built_matrix() {
    for (seed, n) in [(3, 2), (4, 8), (5, 32)] {
        let model = random_model(seed, n, Kind::Line).unwrap();
        let phi = DVector::from_iterator(n, model.weights().iter().map(|w| w.sqrt()));
        for lambda in [-10.0, -0.1, 1.0] {
            let a = DMatrix::from_diagonal(&DVector::from_column_slice(model.sites()))
                + &phi * phi.transpose() * lambda;
            let eig = SymmetricEigen::new(a);
            let mut want: Vec<(f64, f64)> = (0..n)
                .map(|k| {
                    (
                        eig.eigenvalues[k],
                        eig.eigenvectors.column(k).dot(&phi).powi(2),
                    )
                })
                .collect();
            want.sort_by(|x, y| x.0.total_cmp(&y.0));
            let got = perturb_selfadjoint(&model, lambda).unwrap();
            assert_eq!(got.len(), n);
            for (g, w) in got.atoms().iter().zip(&want) {
                assert!(
                    (g.0 - w.0).abs() <= 1e-9 * (1.0 + lambda.abs()),
                    "{g:?} vs {w:?}"
                );
                assert!((g.1 - w.1).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn perturbed_cauchy_transform_follows_resolvent_identity() {
    // F_λ = F / (1 + λF) for the spectral measure of φ under A + λφφ*.
    let model =
        CyclicOperatorModel::new(Kind::Line, vec![-0.6, 0.1, 0.9], vec![0.2, 0.5, 0.3]).unwrap();
    let base = model.line_measure().unwrap();
    let z = c(0.3, 0.7);
    for lambda in [-2.0, 0.5, 7.0] {
        let f = base.cauchy_transform(z).unwrap();
        let want = f / (1.0 + lambda * f);
        let got = perturb_selfadjoint(&model, lambda)
            .unwrap()
            .cauchy_transform(z)
            .unwrap();
        assert!((got - want).norm() < 1e-12);
    }
}

#[test]
fn clark_masses_are_reciprocal_boundary_derivatives() {
    let zeros = [c(0.0, 0.0), c(0.5, -0.3), c(-0.2, 0.7), c(0.6, 0.6)];
    let theta = BlaschkeProduct::new(zeros.to_vec(), ONE).unwrap();
    for k in 0..7 {
        let alpha = Complex64::from_polar(1.0, 0.9 * k as f64 + 0.2);
        let mu = clark_measure(&theta, alpha).unwrap();
        assert_eq!(mu.len(), zeros.len());
        for (s, m) in mu.atoms() {
            let xi = Complex64::from_polar(1.0, *s);
            assert!((blaschke(&zeros, xi) - alpha).norm() < 1e-10);
            let speed: f64 = zeros
                .iter()
                .map(|a| (1.0 - a.norm_sqr()) / (xi - a).norm_sqr())
                .sum();
            assert!((m - 1.0 / speed).abs() < 1e-10);
        }
    }
}

#[test]
fn clark_measure_of_z_squared() {
    let theta = BlaschkeProduct::monomial(2, ONE).unwrap();
    let mu = clark_measure(&theta, Complex64::from_polar(1.0, 1.0)).unwrap();
    let mut angles: Vec<f64> = mu.angles();
    angles.sort_by(f64::total_cmp);
    assert!((angles[0] - 0.5).abs() < 1e-12 && (angles[1] - (0.5 + PI)).abs() < 1e-12);
    assert!(mu.masses().iter().all(|m| (m - 0.5).abs() < 1e-12));
}

#[test]
fn unitary_perturbation_matches_resolvent_of_hand_built_matrix() {
    let model = random_model(9, 6, Kind::Circle).unwrap();
    let n = model.dim();
    let phi = DVector::from_iterator(n, model.weights().iter().map(|w| c(w.sqrt(), 0.0)));
    let u = CMatrix::from_diagonal(&DVector::from_iterator(
        n,
        model.sites().iter().map(|&s| Complex64::from_polar(1.0, s)),
    ));
    let alpha = Complex64::from_polar(1.0, 2.2);
    let ua = (CMatrix::identity(n, n) + &phi * phi.adjoint() * (alpha - ONE)) * u;
    let nu = perturb_unitary(&model, alpha).unwrap();
    for z in [c(0.1, 0.2), c(-0.7, 0.3), c(0.0, -0.95)] {
        let x = (CMatrix::identity(n, n) - ua.adjoint() * z)
            .lu()
            .solve(&phi)
            .unwrap();
        let want = phi.dotc(&x);
        assert!((nu.cauchy_transform(z).unwrap() - want).norm() < 1e-10);
    }
}

#[test]
fn t_alpha_spectrum_is_the_level_set() {
    let theta = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.3, 0.4), c(-0.5, -0.1)], ONE).unwrap();
    let ms = ModelSpace::new(theta.clone()).unwrap();
    let alpha = Complex64::from_polar(1.0, -1.3);
    let t = t_alpha_matrix(&ms, alpha).unwrap();
    for xi in theta.level_set(alpha).unwrap() {
        let shifted = &t - CMatrix::identity(3, 3) * xi;
        let smallest = shifted.svd(false, false).singular_values.min();
        assert!(smallest < 1e-10, "{xi}: {smallest}");
    }
}

#[test]
fn rank_two_transform_matches_resolvent() {
    let theta = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.4, -0.2), c(-0.3, 0.5)], ONE).unwrap();
    let setup = RankTwoSetup::new(theta, vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let family = setup.family();
    let phi2 = &family.vectors()[1];
    let n = family.dim();
    for (a, b) in [(0.3, 1.7), (2.9, -0.4), (-2.0, 0.0)] {
        let (alpha, beta) = (Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b));
        let u = family.recursive_unitary(&[alpha, beta]).unwrap();
        for z in [c(0.2, 0.1), c(-0.5, 0.6), c(0.0, 0.9)] {
            let x = (CMatrix::identity(n, n) - u.adjoint() * z)
                .lu()
                .solve(phi2)
                .unwrap();
            let want = phi2.dotc(&x);
            let got = setup.knu_alpha_beta(alpha, beta, z).unwrap();
            assert!((got - want).norm() < 1e-8, "{got} vs {want}");
        }
    }
}

#[test]
fn density_is_one_when_curve_vanishes_at_origin() {
    let theta = BlaschkeProduct::monomial(3, ONE).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let setup = RankTwoSetup::new(theta, vec![c(0.0, 0.0), c(s, 0.0), c(0.0, s)]).unwrap();
    let second = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.5, 0.5)], ONE).unwrap();
    let curve =
        AnalyticCurve::new(vec![BlaschkeProduct::monomial(1, ONE).unwrap(), second]).unwrap();
    for z in [c(0.0, 0.0), c(0.5, -0.2), c(-0.3, 0.9)] {
        assert!((setup.phi_density(&curve, z).unwrap() - ONE).norm() < 1e-12);
    }
    assert!((RankTwoSetup::phi_bound(&curve) - 1.0).abs() < 1e-15);
}

#[test]
fn quadrature_closed_forms() {
    let e = gauss_kronrod(|x| x, 0.0, 1.0, GaussKronrodConfig::default()).unwrap();
    assert!((e.value - 0.5).abs() < 1e-12);
    let z = 0.5f64;
    let e = periodic_trapezoid(
        |s| (1.0 - z * z) / (1.0 - 2.0 * z * s.cos() + z * z),
        TrapezoidConfig::default(),
    )
    .unwrap();
    assert!((e.value - 1.0).abs() < 1e-10);
    assert!((e.value - 1.0).abs() <= e.error + 4.0 * f64::EPSILON);
    let e = periodic_trapezoid(|s| (3.0 * s).cos().powi(2), TrapezoidConfig::default()).unwrap();
    assert!((e.value - 0.5).abs() < 1e-12);
}

#[test]
fn random_models_are_reproducible_and_separated() {
    let one = random_model(42, 1, Kind::Line).unwrap();
    assert_eq!(one.weights(), &[1.0]);
    assert_eq!(
        random_model(7, 16, Kind::Circle).unwrap(),
        random_model(7, 16, Kind::Circle).unwrap()
    );
    for kind in [Kind::Line, Kind::Circle] {
        let m = random_model(5, 64, kind).unwrap();
        let mut s = m.sites().to_vec();
        s.sort_by(f64::total_cmp);
        let gap = s
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(gap >= 1.0 / 256.0, "{gap}");
        if kind == Kind::Line {
            assert!(s[0] >= -1.0 && s[63] <= 1.0);
        } else {
            assert!(s[0] + TAU - s[63] >= 1.0 / 256.0);
        }
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
