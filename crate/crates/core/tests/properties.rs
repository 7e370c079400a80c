use num_complex::Complex64;
use proptest::prelude::*;

use clark_lab::herglotz::BlaschkeProduct;
use clark_lab::linalg::unitarity_residual;
use clark_lab::model_space::{t_alpha_matrix, ModelSpace};
use clark_lab::rank_one::{clark_measure, perturb_selfadjoint, CyclicOperatorModel, Kind};

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.85, 0.0f64..std::f64::consts::TAU).prop_map(|(r, s)| Complex64::from_polar(r, s))
}

fn line_model() -> impl Strategy<Value = CyclicOperatorModel> {
    prop::collection::btree_set(-1000i32..1000, 1..12).prop_flat_map(|sites| {
        let n = sites.len();
        (Just(sites), prop::collection::vec(0.05f64..1.0, n)).prop_map(|(sites, w)| {
            let total: f64 = w.iter().sum();
            let sites = sites.into_iter().map(|s| s as f64 / 1000.0).collect();
            CyclicOperatorModel::new(Kind::Line, sites, w.iter().map(|x| x / total).collect())
                .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clark_measures_live_on_the_level_set_with_poisson_mass(
        zeros in prop::collection::vec(disk_point(), 1..8),
        a in 0.0f64..std::f64::consts::TAU,
    ) {
        let theta = BlaschkeProduct::new(zeros.clone(), Complex64::new(1.0, 0.0)).unwrap();
        let alpha = Complex64::from_polar(1.0, a);
        let mu = clark_measure(&theta, alpha).unwrap();
        prop_assert_eq!(mu.len(), zeros.len());
        let t0 = theta.at_origin();
        let poisson = (1.0 - t0.norm_sqr()) / (alpha - t0).norm_sqr();
        prop_assert!((mu.total_mass() - poisson).abs() < 1e-10 * poisson.max(1.0));
        for xi in mu.points() {
            prop_assert!((theta.eval(xi).unwrap() - alpha).norm() < 1e-9);
        }
    }

    #[test]
    fn perturbed_spectra_interlace(model in line_model(), lambda in 0.01f64..20.0) {
        let mu = perturb_selfadjoint(&model, lambda).unwrap();
        prop_assert_eq!(mu.len(), model.dim());
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        let pos = mu.positions();
        for (k, &s) in model.sites().iter().enumerate() {
            prop_assert!(pos[k] >= s - 1e-12);
            if k + 1 < pos.len() {
                prop_assert!(pos[k] <= model.sites()[k + 1] + 1e-12);
            }
        }
    }

    #[test]
    fn compressed_shift_perturbations_are_unitary(
        zeros in prop::collection::vec(disk_point(), 0..7),
        a in 0.0f64..std::f64::consts::TAU,
    ) {
        let mut zeros = zeros;
        zeros.insert(0, Complex64::new(0.0, 0.0));
        let ms = ModelSpace::new(BlaschkeProduct::new(zeros, Complex64::new(1.0, 0.0)).unwrap()).unwrap();
        let t = t_alpha_matrix(&ms, Complex64::from_polar(1.0, a)).unwrap();
        prop_assert!(unitarity_residual(&t) < 1e-10);
    }
}
