//! Executes scenarios: each check is an independent task with its own random
//! stream, and the report is assembled in check order.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{AtomicMeasure, ExtendedReal};
use crate::model_space::{
    intertwine_check, lemma7_decompose, mu_one_defect, spectral_consistency, t_alpha_matrix,
    v_alpha, v_alpha_star, v_alpha_unitarity, ModelSpace,
};
use crate::quadrature::{
    gauss_kronrod, periodic_trapezoid, periodic_trapezoid_complex, GaussKronrodConfig,
    TrapezoidConfig,
};
use crate::random::rng_for;
use crate::rank_n::{
    curve_disintegration_check, curve_mean_transform, herglotz_positivity_check,
    theorem4_axis_criterion, theorem9_nullset_check, RankNPerturbationFamily, RankTwoSetup,
};
use crate::rank_one::clark::clark_measure;
use crate::rank_one::{
    disintegration_check_circle, disintegration_check_line, matrix_oracle_selfadjoint,
    perturb_selfadjoint, simon_wolff_classify, simon_wolff_classify_circle,
    verify_clark_correspondence, Finiteness,
};
use crate::report::{CheckRecord, Recorder, RunReport};
use crate::scenario::{
    build_arcs, build_curve, build_intervals, complex_list, parse_scenario, AngleGrid, Check,
    Scenario, ThetaSpec, Tolerances, VectorSpec,
};

/// Fixed bound on `T_α` and recursion unitarity residuals.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;
/// Fixed bound for the circle disintegration identity.
pub const CIRCLE_DISINTEGRATION_TOLERANCE: f64 = 1e-6;
/// Fixed bound for the line disintegration identity.
pub const LINE_DISINTEGRATION_TOLERANCE: f64 = 1e-3;
/// Fixed bound for curve mean values by periodic trapezoid.
pub const CURVE_MEAN_TOLERANCE: f64 = 1e-6;
/// Fixed bound for the closed-form worked decompositions.
pub const WORKED_CASE_TOLERANCE: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub timings: bool,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn run_scenario_file(path: &Path, options: RunOptions) -> Result<RunReport> {
    run_scenario(&load_scenario(path)?, options)
}

pub fn run_scenario(scenario: &Scenario, options: RunOptions) -> Result<RunReport> {
    let tol = scenario.tolerances;
    let seed = scenario.seed;
    let work = || -> Vec<Vec<CheckRecord>> {
        scenario
            .checks
            .par_iter()
            .enumerate()
            .map(|(i, check)| run_check(i, check, seed, tol, options.timings))
            .collect()
    };
    let records = match options.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Validation {
                field: "workers".into(),
                reason: e.to_string(),
            })?
            .install(work),
        None => work(),
    };
    Ok(RunReport::new(
        scenario.name.clone(),
        seed,
        records.into_iter().flatten().collect(),
    ))
}

fn run_check(
    index: usize,
    check: &Check,
    seed: u64,
    tol: Tolerances,
    timings: bool,
) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut rec = Recorder::new(index, check.name());
    let mut rng = rng_for(seed, index as u64);
    if let Err(e) = dispatch(check, &mut rng, tol, &mut rec) {
        rec.error("run", e.to_string());
    }
    let elapsed = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    rec.finish(elapsed)
}

fn dispatch(
    check: &Check,
    rng: &mut ChaCha8Rng,
    tol: Tolerances,
    rec: &mut Recorder,
) -> Result<()> {
    match check {
        Check::AronszajnKrein { models, lambdas } => {
            let mut pos = 0.0f64;
            let mut mass = 0.0f64;
            let mut mismatches = 0usize;
            let mut dims = Vec::new();
            for spec in models {
                let model = spec.build(rng)?;
                dims.push(model.dim());
                for &lambda in lambdas {
                    let a = perturb_selfadjoint(&model, lambda)?;
                    let b = matrix_oracle_selfadjoint(&model, lambda)?;
                    if a.len() != b.len() {
                        mismatches += 1;
                        continue;
                    }
                    for (x, y) in a.atoms().iter().zip(b.atoms()) {
                        pos = pos.max((x.0 - y.0).abs() / (1.0 + lambda.abs()));
                        mass = mass.max((x.1 - y.1).abs());
                    }
                }
            }
            dims.sort_unstable();
            dims.dedup();
            rec.param("models", models.len());
            rec.param("dimensions", format!("{dims:?}"));
            rec.param("lambdas", format!("{lambdas:?}"));
            rec.equal("atom_counts", mismatches, 0);
            rec.at_most("positions_relative", pos, tol.algebraic);
            rec.at_most("masses", mass, tol.oracle);
        }
        Check::ClarkCorrespondence { models, alphas } => {
            let (mut pos, mut mass, mut total, mut mismatches) = (0.0f64, 0.0f64, 0.0f64, 0usize);
            let mut samples = 0;
            for spec in models {
                let model = spec.build(rng)?;
                let a = alphas.unimodular(rng);
                samples += a.len();
                let r = verify_clark_correspondence(&model, &a)?;
                pos = pos
                    .max(r.max_position_deviation)
                    .max(r.oracle_position_deviation);
                mass = mass.max(r.max_mass_deviation).max(r.oracle_mass_deviation);
                total = total.max(r.max_total_mass_defect);
                mismatches += r.atom_count_mismatches;
            }
            rec.param("models", models.len());
            rec.param("alpha_samples", samples);
            rec.equal("atom_counts", mismatches, 0);
            rec.at_most("positions", pos, tol.algebraic);
            rec.at_most("masses", mass, tol.oracle);
            rec.at_most("total_mass", total, UNITARITY_TOLERANCE);
        }
        Check::CircleDisintegration {
            theta,
            arcs,
            tolerance,
        } => {
            let theta = theta.build(rng)?;
            let arcs_spec = arcs;
            let arcs = build_arcs("arcs", arcs)?;
            let t = tolerance.unwrap_or(CIRCLE_DISINTEGRATION_TOLERANCE);
            rec.param("degree", theta.degree());
            for (k, arc) in arcs.iter().enumerate() {
                let e =
                    disintegration_check_circle(&theta, &[*arc], GaussKronrodConfig::default())?;
                rec.param("arc", format!("{:?}", arcs_spec[k]));
                rec.close(&format!("arc{k}"), e.estimate, e.expected, t);
            }
        }
        Check::LineDisintegration {
            model,
            intervals,
            window,
            tolerance,
        } => {
            let model = model.build(rng)?;
            let pieces = build_intervals("intervals", intervals)?;
            let t = tolerance.unwrap_or(LINE_DISINTEGRATION_TOLERANCE);
            rec.param("dimension", model.dim());
            for (k, p) in pieces.iter().enumerate() {
                let e = disintegration_check_line(
                    &model,
                    &[*p],
                    *window,
                    GaussKronrodConfig::default(),
                )?;
                rec.param("interval", format!("{:?}", intervals[k]));
                rec.param("error_bound", crate::report::num(e.error_bound()));
                rec.close(&format!("interval{k}"), e.estimate, e.expected, t);
            }
        }
        Check::CurveDisintegration {
            theta,
            f,
            curve,
            arcs,
            tolerance,
        } => {
            let setup = rank_two(rng, theta, f)?;
            let curve = build_curve(rng, curve)?;
            let arcs = build_arcs("arcs", arcs)?;
            let t = tolerance.unwrap_or(tol.quadrature);
            let r = curve_disintegration_check(&setup, &curve, &arcs, t * 1e-2)?;
            rec.param("samples", r.samples);
            rec.param("left_error", crate::report::num(r.left_error));
            rec.param("right_error", crate::report::num(r.right_error));
            rec.equal("atom_counts", r.atom_count_failures, 0);
            rec.close("identity", r.left, r.right, t);
        }
        Check::CurveMean {
            theta,
            f,
            curve,
            points,
            tolerance,
        } => {
            let setup = rank_two(rng, theta, f)?;
            let curve = build_curve(rng, curve)?;
            let t = tolerance.unwrap_or(CURVE_MEAN_TOLERANCE);
            let mut worst = 0.0f64;
            for z in points.build(rng) {
                let (mean, _) =
                    curve_mean_transform(&setup, &curve, z, TrapezoidConfig::default())?;
                worst = worst.max((mean - setup.phi_density(&curve, z)?).norm());
            }
            rec.at_most("mean_value", worst, t);
        }
        Check::ModelSpace {
            theta,
            alphas,
            vectors,
        } => model_space_check(rng, theta, alphas, *vectors, tol, rec)?,
        Check::Lemma7 {
            theta,
            f,
            alphas,
            points,
            expect_g,
            expect_h,
        } => {
            let theta = theta.build(rng)?;
            let ms = ModelSpace::new(theta)?;
            let fv = f.build(rng, &ms)?;
            let d = lemma7_decompose(&ms, &fv)?;
            rec.param("degree", ms.dim());
            rec.param("condition", crate::report::num(d.condition));
            rec.at_most("boundary_residual", d.boundary_residual, tol.algebraic);
            let zs = points.build(rng);
            let (mut knu, mut atoms) = (0.0f64, 0.0f64);
            for alpha in alphas.unimodular(rng) {
                atoms = atoms.max(d.atom_defect(&ms, alpha)?);
                for &z in &zs {
                    knu = knu.max(
                        (d.knu_alpha(&ms, alpha, z)? - d.knu_alpha_direct(&ms, alpha, z)?).norm(),
                    );
                }
            }
            rec.at_most("cauchy_transform", knu, tol.algebraic);
            rec.at_most("atom_values", atoms, tol.algebraic);
            rec.at_most("mu_one", mu_one_defect(&ms)?, UNITARITY_TOLERANCE);
            if d.f_at_origin.norm() <= 1e-10 {
                rec.at_most("nu_one", d.nu_one_defect(&ms)?, tol.algebraic);
            }
            if let Some(g) = expect_g {
                let want = ms.vector(complex_list(g))?;
                rec.at_most("worked_g", d.g.max_distance(&want), WORKED_CASE_TOLERANCE);
            }
            if let Some(h) = expect_h {
                let want = ms.vector(complex_list(h))?;
                rec.at_most("worked_h", d.h.max_distance(&want), WORKED_CASE_TOLERANCE);
            }
        }
        Check::RankTwoOracle {
            theta,
            f,
            alphas,
            betas,
            points,
        } => {
            let setup = rank_two(rng, theta, f)?;
            let a = alphas.unimodular(rng);
            let b = betas.unimodular(rng);
            let zs = points.build(rng);
            let mut worst = 0.0f64;
            for &alpha in &a {
                for &beta in &b {
                    let nu = setup.oracle_measure(alpha, beta)?;
                    for &z in &zs {
                        let want = nu.cauchy_transform(z)?;
                        worst = worst.max((setup.knu_alpha_beta(alpha, beta, z)? - want).norm());
                    }
                }
            }
            rec.param("grid", format!("{}x{}x{}", a.len(), b.len(), zs.len()));
            rec.param("degree", setup.theta().degree());
            rec.at_most("cauchy_transform", worst, tol.oracle);
        }
        Check::Positivity {
            theta,
            f,
            alphas,
            points,
            curve,
        } => {
            let setup = rank_two(rng, theta, f)?;
            let a = alphas.unimodular(rng);
            let zs = points.build(rng);
            rec.param("grid", format!("{}x{}", a.len(), zs.len()));
            rec.above(
                "min_real_part",
                herglotz_positivity_check(&setup, &a, &zs)?,
                0.5,
                tol.algebraic,
            );
            if let Some(c) = curve {
                let curve = build_curve(rng, c)?;
                let bound = RankTwoSetup::phi_bound(&curve);
                let mut worst = 0.0f64;
                for &z in &zs {
                    worst = worst.max(setup.phi_density(&curve, z)?.norm());
                }
                for k in 0..256 {
                    worst = worst.max(setup.phi_boundary(&curve, TAU * k as f64 / 256.0)?.norm());
                }
                rec.param("phi_bound", crate::report::num(bound));
                rec.at_most("phi_excess", (worst - bound).max(0.0), tol.algebraic);
            }
        }
        Check::SimonWolff {
            measure,
            probes,
            expect,
        } => {
            let (classes, values, atoms): (Vec<Finiteness>, Vec<ExtendedReal>, Vec<bool>) =
                match measure {
                    AtomicMeasure::Line(mu) => {
                        let r = simon_wolff_classify(mu, probes);
                        let at = probes
                            .iter()
                            .map(|&y| mu.atoms().iter().any(|a| a.0 == y))
                            .collect();
                        (
                            r.iter().map(|p| p.class()).collect(),
                            r.iter().map(|p| p.value).collect(),
                            at,
                        )
                    }
                    AtomicMeasure::Circle(nu) => {
                        let r = simon_wolff_classify_circle(nu, probes)?;
                        let at = probes
                            .iter()
                            .map(|&s| {
                                nu.atoms().iter().any(|a| {
                                    crate::rank_one::clark::wrapped(a.0 - s).abs() <= 1e-12
                                })
                            })
                            .collect();
                        (
                            r.iter().map(|p| p.class()).collect(),
                            r.iter().map(|p| p.value).collect(),
                            at,
                        )
                    }
                };
            let mismatches = classes
                .iter()
                .zip(&atoms)
                .filter(|(c, a)| (**c == Finiteness::Infinite) != **a)
                .count();
            rec.param("probes", probes.len());
            rec.equal("classification", mismatches, 0);
            if let Some(e) = expect {
                let wrong = values
                    .iter()
                    .zip(e)
                    .filter(|(v, w)| v.finite() != **w)
                    .count();
                rec.equal("values", wrong, 0);
            }
        }
        Check::RecursiveUnitary {
            model,
            vectors,
            points,
        } => {
            let model = model.build(rng)?;
            let vs = vectors.build(rng, model.dim())?;
            let orthogonal = vs
                .iter()
                .enumerate()
                .all(|(j, a)| vs[j + 1..].iter().all(|b| a.dotc(b).norm() <= 1e-12));
            let family = RankNPerturbationFamily::new(model, vs)?;
            let n = family.rank();
            rec.param("rank", n);
            rec.param("dimension", family.dim());
            let identity = family.recursive_unitary(&vec![ONE; n])?;
            rec.at_most(
                "identity",
                linalg::spectral_norm(&(identity - family.base_matrix())),
                UNITARITY_TOLERANCE,
            );
            let mut unitarity = 0.0f64;
            let mut collapse = 0.0f64;
            for _ in 0..*points {
                let alpha: Vec<Complex64> = (0..n)
                    .map(|_| crate::random::random_unimodular(rng))
                    .collect();
                let u = family.recursive_unitary(&alpha)?;
                unitarity = unitarity.max(linalg::unitarity_residual(&u));
                if orthogonal {
                    collapse =
                        collapse.max(linalg::spectral_norm(&(u - family.orthogonal_sum(&alpha)?)));
                }
            }
            rec.at_most("unitarity", unitarity, UNITARITY_TOLERANCE);
            if orthogonal {
                rec.at_most("orthogonal_sum", collapse, UNITARITY_TOLERANCE);
            }
        }
        Check::AxisCriterion {
            model,
            vectors,
            probes,
            include_atoms,
        } => {
            let model = model.build(rng)?;
            let vs = vectors.build(rng, model.dim())?;
            let mut p = probes.build(rng);
            if *include_atoms {
                p.extend(model.sites().iter().map(|s| s.rem_euclid(TAU)));
            }
            let family = RankNPerturbationFamily::new(model, vs)?;
            let reports = theorem4_axis_criterion(&family, &p)?;
            let infinite: usize = reports
                .iter()
                .map(|r| {
                    r.classes
                        .iter()
                        .filter(|c| **c == Finiteness::Infinite)
                        .count()
                })
                .sum();
            rec.param("axes", reports.len());
            rec.param("probes", p.len());
            rec.param("infinite_flags", infinite);
            rec.equal(
                "classification",
                reports.iter().map(|r| r.mismatches).sum::<usize>(),
                0,
            );
        }
        Check::NullSet {
            theta,
            f,
            curve,
            set,
            xis,
            expect_collisions,
        } => {
            let setup = rank_two(rng, theta, f)?;
            let curve = build_curve(rng, curve)?;
            let xi = xis.build(rng);
            let r = theorem9_nullset_check(setup.family(), &curve, set, &xi)?;
            let mut hit: Vec<usize> = r.collisions.iter().map(|c| c.sample).collect();
            hit.dedup();
            rec.param("samples", r.samples);
            rec.param("set", format!("{set:?}"));
            rec.equal("collisions", hit, expect_collisions.clone());
        }
        Check::Quadrature => quadrature_check(rec)?,
    }
    Ok(())
}

fn rank_two(rng: &mut ChaCha8Rng, theta: &ThetaSpec, f: &VectorSpec) -> Result<RankTwoSetup> {
    let ms = ModelSpace::new(theta.build(rng)?)?;
    let fv = f.build(rng, &ms)?;
    RankTwoSetup::from_vector(ms, &fv)
}

fn model_space_check(
    rng: &mut ChaCha8Rng,
    theta: &ThetaSpec,
    alphas: &AngleGrid,
    vectors: usize,
    tol: Tolerances,
    rec: &mut Recorder,
) -> Result<()> {
    use rand_distr::{Distribution, StandardNormal};

    let ms = ModelSpace::new(theta.build(rng)?)?;
    let a = alphas.unimodular(rng);
    rec.param("degree", ms.dim());
    rec.param("alphas", a.len());
    rec.param("grid", ms.grid_size());
    rec.at_most("gram", ms.gram_defect(), UNITARITY_TOLERANCE);
    rec.at_most(
        "orthogonality",
        ms.orthogonality_defect(),
        UNITARITY_TOLERANCE,
    );
    let (mut unitarity, mut intertwining, mut v_unitarity, mut pos, mut mass) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &alpha in &a {
        unitarity = unitarity.max(linalg::unitarity_residual(&t_alpha_matrix(&ms, alpha)?));
        intertwining = intertwining.max(intertwine_check(&ms, alpha)?);
        v_unitarity = v_unitarity.max(v_alpha_unitarity(&ms, alpha)?);
        let (p, m) = spectral_consistency(&ms, alpha)?;
        pos = pos.max(p);
        mass = mass.max(m);
    }
    rec.at_most("t_alpha_unitarity", unitarity, UNITARITY_TOLERANCE);
    rec.at_most("intertwining", intertwining, tol.algebraic);
    rec.at_most("v_alpha_unitarity", v_unitarity, tol.algebraic);
    rec.at_most("spectrum_positions", pos, tol.algebraic);
    rec.at_most("spectrum_masses", mass, tol.oracle);

    let (mut isometry, mut round_trip) = (0.0f64, 0.0f64);
    for j in 0..vectors {
        let alpha = a[j % a.len()];
        let mu = clark_measure(ms.theta(), alpha)?;
        let values: Vec<Complex64> = (0..mu.len())
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let l2: f64 = values
            .iter()
            .zip(mu.masses())
            .map(|(v, m)| v.norm_sqr() * m)
            .sum::<f64>()
            .sqrt();
        let fv = v_alpha(&ms, alpha, &values)?;
        isometry = isometry.max((fv.norm() - l2).abs());
        let back = v_alpha_star(&ms, alpha, &fv)?;
        round_trip = round_trip.max(
            back.iter()
                .zip(&values)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
        );
    }
    rec.param("vectors", vectors);
    rec.at_most("v_alpha_isometry", isometry, tol.algebraic);
    rec.at_most("round_trip", round_trip, tol.algebraic);
    Ok(())
}

/// Integrals with known values; the error estimate must cover the true
/// error (up to rounding) and meet the target.
fn quadrature_check(rec: &mut Recorder) -> Result<()> {
    let gk = GaussKronrodConfig::default();
    let tr = TrapezoidConfig::default();
    let slack = |exact: f64| 8.0 * f64::EPSILON * exact.abs().max(1.0);
    let mut cases: Vec<(&str, f64, f64, f64)> = Vec::new();
    let e = gauss_kronrod(|x| x, 0.0, 1.0, gk)?;
    cases.push(("linear", e.value, e.error, 0.5));
    let e = gauss_kronrod(f64::sin, 0.0, PI, gk)?;
    cases.push(("sine", e.value, e.error, 2.0));
    let e = gauss_kronrod(f64::sqrt, 0.0, 1.0, gk)?;
    cases.push(("sqrt", e.value, e.error, 2.0 / 3.0));
    let z = Complex64::new(0.5, 0.0);
    let e = periodic_trapezoid(
        |s| (1.0 - z.norm_sqr()) / (Complex64::from_polar(1.0, s) - z).norm_sqr(),
        tr,
    )?;
    cases.push(("poisson", e.value, e.error, 1.0));
    // I₀(1)
    let e = periodic_trapezoid(|s| s.cos().exp(), tr)?;
    cases.push(("bessel", e.value, e.error, 1.266_065_877_752_008_4));
    let e = periodic_trapezoid_complex(
        |s| ONE / (ONE - Complex64::from_polar(0.9, -s) * Complex64::new(0.0, 0.5)),
        tr,
    )?;
    cases.push(("cauchy", e.value.re, e.error, 1.0));
    for (name, value, error, exact) in cases {
        rec.close(name, value, exact, 1e-10);
        rec.at_most(
            &format!("{name}_estimate_covers"),
            ((value - exact).abs() - error - slack(exact)).max(0.0),
            0.0,
        );
    }
    Ok(())
}
