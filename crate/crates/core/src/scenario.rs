//! Scenario files: a name, a seed, tolerance tiers and a list of checks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::herglotz::BlaschkeProduct;
use crate::linalg::{self, CVector};
use crate::measures::{Arc, AtomicMeasure, Interval};
use crate::model_space::{ModelSpace, ModelVector};
use crate::random;
use crate::rank_n::AnalyticCurve;
use crate::rank_one::model::{CyclicOperatorModel, Kind};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
}

/// Default accuracy tiers: exact algebra, eigensolver cross-checks, nested
/// quadrature.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub algebraic: f64,
    pub oracle: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-9,
            oracle: 1e-8,
            quadrature: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ThetaSpec {
    Explicit(BlaschkeProduct),
    /// `z^n`.
    Monomial(usize),
    Random {
        degree: usize,
        #[serde(default = "yes")]
        vanish_at_origin: bool,
    },
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Explicit(CyclicOperatorModel),
    Random { kind: Kind, n: usize },
}

/// An element of a model space.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSpec {
    Coefficients(Vec<[f64; 2]>),
    /// Random unit vector vanishing at the origin.
    Random,
}

/// Perturbation vectors of a rank-n family.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorsSpec {
    Explicit(Vec<Vec<[f64; 2]>>),
    /// `n` independent random unit vectors.
    Random(usize),
    /// `n` random orthonormal vectors.
    Orthonormal(usize),
}

/// Angles on the circle.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleGrid {
    Angles(Vec<f64>),
    Uniform(usize),
    Random(usize),
}

/// Points of the open disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DiskGrid {
    Points(Vec<[f64; 2]>),
    Random { count: usize, radius: f64 },
    Polar { radii: Vec<f64>, angles: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    /// Secular-equation measures against the symmetric eigensolver.
    AronszajnKrein {
        models: Vec<ModelSpec>,
        lambdas: Vec<f64>,
    },
    /// Clark measures of the associated inner function against the
    /// perturbation formula and the unitary eigensolver.
    ClarkCorrespondence {
        models: Vec<ModelSpec>,
        alphas: AngleGrid,
    },
    CircleDisintegration {
        theta: ThetaSpec,
        arcs: Vec<[f64; 2]>,
        tolerance: Option<f64>,
    },
    LineDisintegration {
        model: ModelSpec,
        intervals: Vec<[f64; 2]>,
        #[serde(default = "default_window")]
        window: f64,
        tolerance: Option<f64>,
    },
    CurveDisintegration {
        theta: ThetaSpec,
        f: VectorSpec,
        curve: Vec<ThetaSpec>,
        arcs: Vec<[f64; 2]>,
        tolerance: Option<f64>,
    },
    CurveMean {
        theta: ThetaSpec,
        f: VectorSpec,
        curve: Vec<ThetaSpec>,
        points: DiskGrid,
        tolerance: Option<f64>,
    },
    ModelSpace {
        theta: ThetaSpec,
        alphas: AngleGrid,
        #[serde(default = "default_vectors")]
        vectors: usize,
    },
    Lemma7 {
        theta: ThetaSpec,
        f: VectorSpec,
        alphas: AngleGrid,
        points: DiskGrid,
        expect_g: Option<Vec<[f64; 2]>>,
        expect_h: Option<Vec<[f64; 2]>>,
    },
    RankTwoOracle {
        theta: ThetaSpec,
        f: VectorSpec,
        alphas: AngleGrid,
        betas: AngleGrid,
        points: DiskGrid,
    },
    Positivity {
        theta: ThetaSpec,
        f: VectorSpec,
        alphas: AngleGrid,
        points: DiskGrid,
        curve: Option<Vec<ThetaSpec>>,
    },
    SimonWolff {
        measure: AtomicMeasure,
        probes: Vec<f64>,
        /// Expected values per probe; `null` for infinite.
        expect: Option<Vec<Option<f64>>>,
    },
    RecursiveUnitary {
        model: ModelSpec,
        vectors: VectorsSpec,
        #[serde(default = "default_points")]
        points: usize,
    },
    AxisCriterion {
        model: ModelSpec,
        vectors: VectorsSpec,
        probes: AngleGrid,
        #[serde(default)]
        include_atoms: bool,
    },
    NullSet {
        theta: ThetaSpec,
        f: VectorSpec,
        curve: Vec<ThetaSpec>,
        set: Vec<f64>,
        xis: AngleGrid,
        /// Sample indices expected to collide with the set.
        #[serde(default)]
        expect_collisions: Vec<usize>,
    },
    /// Integrals with closed forms, checking the error estimates.
    Quadrature,
}

fn default_window() -> f64 {
    100.0
}

fn default_vectors() -> usize {
    20
}

fn default_points() -> usize {
    16
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::AronszajnKrein { .. } => "aronszajn_krein",
            Check::ClarkCorrespondence { .. } => "clark_correspondence",
            Check::CircleDisintegration { .. } => "circle_disintegration",
            Check::LineDisintegration { .. } => "line_disintegration",
            Check::CurveDisintegration { .. } => "curve_disintegration",
            Check::CurveMean { .. } => "curve_mean",
            Check::ModelSpace { .. } => "model_space",
            Check::Lemma7 { .. } => "lemma7",
            Check::RankTwoOracle { .. } => "rank_two_oracle",
            Check::Positivity { .. } => "positivity",
            Check::SimonWolff { .. } => "simon_wolff",
            Check::RecursiveUnitary { .. } => "recursive_unitary",
            Check::AxisCriterion { .. } => "axis_criterion",
            Check::NullSet { .. } => "null_set",
            Check::Quadrature => "quadrature",
        }
    }
}

/// Parses scenario JSON, reporting the position of syntax and shape errors.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

fn positive(field: String, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(field, format!("{v} must be positive and finite")));
    }
    Ok(())
}

fn nonempty<T>(field: String, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    Ok(())
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        positive("tolerances.algebraic".into(), self.algebraic)?;
        positive("tolerances.oracle".into(), self.oracle)?;
        positive("tolerances.quadrature".into(), self.quadrature)
    }
}

impl ThetaSpec {
    fn validate(&self, field: String, need_origin_zero: bool) -> Result<()> {
        match self {
            ThetaSpec::Explicit(b) => {
                if b.degree() == 0 {
                    return Err(invalid(field, "degree must be at least 1"));
                }
                if need_origin_zero && b.at_origin().norm() > 1e-12 {
                    return Err(invalid(field, "this check needs theta(0) = 0"));
                }
            }
            ThetaSpec::Monomial(n) | ThetaSpec::Random { degree: n, .. } if *n == 0 => {
                return Err(invalid(field, "degree must be at least 1"));
            }
            ThetaSpec::Random {
                degree,
                vanish_at_origin,
            } => {
                if *degree > 64 {
                    return Err(invalid(field, "degree above 64 is not supported"));
                }
                if need_origin_zero && !vanish_at_origin {
                    return Err(invalid(field, "this check needs theta(0) = 0"));
                }
            }
            ThetaSpec::Monomial(_) => {}
        }
        Ok(())
    }

    pub fn build<R: Rng>(&self, rng: &mut R) -> Result<BlaschkeProduct> {
        match self {
            ThetaSpec::Explicit(b) => Ok(b.clone()),
            ThetaSpec::Monomial(n) => BlaschkeProduct::monomial(*n, Complex64::new(1.0, 0.0)),
            ThetaSpec::Random {
                degree,
                vanish_at_origin,
            } => random::random_blaschke(rng, *degree, *vanish_at_origin),
        }
    }
}

impl ModelSpec {
    fn validate(&self, field: String, kind: Option<Kind>) -> Result<()> {
        let (k, n) = match self {
            ModelSpec::Explicit(m) => (m.kind(), m.dim()),
            ModelSpec::Random { kind, n } => (*kind, *n),
        };
        if n == 0 || n > linalg::MAX_DENSE_DIM {
            return Err(invalid(
                field,
                format!("dimension {n} outside 1..={}", linalg::MAX_DENSE_DIM),
            ));
        }
        if let Some(want) = kind {
            if want != k {
                return Err(invalid(field, format!("expected a {want:?} model")));
            }
        }
        Ok(())
    }

    pub fn build<R: Rng>(&self, rng: &mut R) -> Result<CyclicOperatorModel> {
        match self {
            ModelSpec::Explicit(m) => Ok(m.clone()),
            ModelSpec::Random { kind, n } => random::random_model_with(rng, *n, *kind),
        }
    }

    fn dim(&self) -> usize {
        match self {
            ModelSpec::Explicit(m) => m.dim(),
            ModelSpec::Random { n, .. } => *n,
        }
    }
}

impl VectorSpec {
    pub fn build<R: Rng>(&self, rng: &mut R, ms: &ModelSpace) -> Result<ModelVector> {
        match self {
            VectorSpec::Coefficients(c) => ms.vector(complex_list(c)),
            VectorSpec::Random => random::random_unit_vector(rng, ms, true),
        }
    }
}

impl VectorsSpec {
    fn validate(&self, field: String, dim: usize) -> Result<()> {
        match self {
            VectorsSpec::Explicit(vs) => {
                nonempty(field.clone(), vs)?;
                for (k, v) in vs.iter().enumerate() {
                    if v.len() != dim {
                        return Err(invalid(
                            format!("{field}[{k}]"),
                            format!("length {} does not match model dimension {dim}", v.len()),
                        ));
                    }
                }
            }
            VectorsSpec::Random(0) | VectorsSpec::Orthonormal(0) => {
                return Err(invalid(field, "need at least one vector"))
            }
            VectorsSpec::Orthonormal(n) if *n > dim => {
                return Err(invalid(
                    field,
                    format!("{n} orthonormal vectors do not fit in dimension {dim}"),
                ))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build<R: Rng>(&self, rng: &mut R, dim: usize) -> Result<Vec<CVector>> {
        let gaussian = |rng: &mut R| -> CVector {
            use rand_distr::{Distribution, StandardNormal};
            CVector::from_fn(dim, |_, _| {
                Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
            })
        };
        let unit = |v: CVector| {
            let n = v.norm();
            v / Complex64::new(n, 0.0)
        };
        Ok(match self {
            VectorsSpec::Explicit(vs) => vs
                .iter()
                .map(|v| linalg::cvector(&complex_list(v)))
                .collect(),
            VectorsSpec::Random(n) => (0..*n).map(|_| unit(gaussian(rng))).collect(),
            VectorsSpec::Orthonormal(n) => {
                let mut out: Vec<CVector> = Vec::new();
                while out.len() < *n {
                    let mut v = gaussian(rng);
                    for _ in 0..2 {
                        for q in &out {
                            let h = q.dotc(&v);
                            v -= q * h;
                        }
                    }
                    out.push(unit(v));
                }
                out
            }
        })
    }
}

impl AngleGrid {
    fn validate(&self, field: String) -> Result<()> {
        match self {
            AngleGrid::Angles(a) => {
                nonempty(field.clone(), a)?;
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(invalid(field, "angles must be finite"));
                }
            }
            AngleGrid::Uniform(0) | AngleGrid::Random(0) => {
                return Err(invalid(field, "count must be positive"))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            AngleGrid::Angles(a) => a.clone(),
            AngleGrid::Uniform(n) => (0..*n).map(|k| TAU * k as f64 / *n as f64).collect(),
            AngleGrid::Random(n) => (0..*n).map(|_| TAU * rng.random::<f64>()).collect(),
        }
    }

    pub fn unimodular<R: Rng>(&self, rng: &mut R) -> Vec<Complex64> {
        self.build(rng)
            .into_iter()
            .map(|s| Complex64::from_polar(1.0, s))
            .collect()
    }
}

impl DiskGrid {
    fn validate(&self, field: String) -> Result<()> {
        let inside = |r: f64| (0.0..1.0).contains(&r);
        match self {
            DiskGrid::Points(p) => {
                nonempty(field.clone(), p)?;
                if p.iter().any(|z| !inside(Complex64::new(z[0], z[1]).norm())) {
                    return Err(invalid(field, "points must lie in the open unit disk"));
                }
            }
            DiskGrid::Random { count, radius } => {
                if *count == 0 || !inside(*radius) {
                    return Err(invalid(field, "need count > 0 and 0 ≤ radius < 1"));
                }
            }
            DiskGrid::Polar { radii, angles } => {
                nonempty(field.clone(), radii)?;
                if *angles == 0 || radii.iter().any(|r| !inside(*r)) {
                    return Err(invalid(field, "need angles > 0 and radii in [0, 1)"));
                }
            }
        }
        Ok(())
    }

    pub fn build<R: Rng>(&self, rng: &mut R) -> Vec<Complex64> {
        match self {
            DiskGrid::Points(p) => complex_list(p),
            DiskGrid::Random { count, radius } => (0..*count)
                .map(|_| random::random_disk_point(rng, *radius))
                .collect(),
            DiskGrid::Polar { radii, angles } => radii
                .iter()
                .flat_map(|&r| {
                    (0..*angles).map(move |k| {
                        Complex64::from_polar(r, TAU * (k as f64 + 0.5) / *angles as f64)
                    })
                })
                .collect(),
        }
    }
}

pub fn complex_list(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn build_arcs(field: &str, arcs: &[[f64; 2]]) -> Result<Vec<Arc>> {
    arcs.iter()
        .enumerate()
        .map(|(k, a)| {
            Arc::new(a[0], a[1]).map_err(|e| invalid(format!("{field}[{k}]"), e.to_string()))
        })
        .collect()
}

pub fn build_intervals(field: &str, intervals: &[[f64; 2]]) -> Result<Vec<Interval>> {
    intervals
        .iter()
        .enumerate()
        .map(|(k, a)| {
            Interval::new(a[0], a[1]).map_err(|e| invalid(format!("{field}[{k}]"), e.to_string()))
        })
        .collect()
}

pub fn build_curve<R: Rng>(rng: &mut R, specs: &[ThetaSpec]) -> Result<AnalyticCurve> {
    AnalyticCurve::new(specs.iter().map(|s| s.build(rng)).collect::<Result<_>>()?)
}

fn validate_curve(field: String, curve: &[ThetaSpec], n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        if curve.len() != n {
            return Err(invalid(
                field,
                format!("need {n} components, got {}", curve.len()),
            ));
        }
    }
    for (k, c) in curve.iter().enumerate() {
        c.validate(format!("{field}[{k}]"), false)?;
    }
    Ok(())
}

fn validate_arcs(field: String, arcs: &[[f64; 2]]) -> Result<()> {
    nonempty(field.clone(), arcs)?;
    build_arcs(&field, arcs).map(|_| ())
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must not be empty"));
        }
        self.tolerances.validate()?;
        nonempty("checks".into(), &self.checks)?;
        for (i, check) in self.checks.iter().enumerate() {
            let p = |s: &str| format!("checks[{i}].{s}");
            let tol = |t: &Option<f64>| t.map_or(Ok(()), |v| positive(p("tolerance"), v));
            match check {
                Check::AronszajnKrein { models, lambdas } => {
                    nonempty(p("models"), models)?;
                    nonempty(p("lambdas"), lambdas)?;
                    for (k, m) in models.iter().enumerate() {
                        m.validate(p(&format!("models[{k}]")), Some(Kind::Line))?;
                    }
                    if lambdas.iter().any(|l| !l.is_finite()) {
                        return Err(invalid(p("lambdas"), "must be finite"));
                    }
                }
                Check::ClarkCorrespondence { models, alphas } => {
                    nonempty(p("models"), models)?;
                    for (k, m) in models.iter().enumerate() {
                        m.validate(p(&format!("models[{k}]")), Some(Kind::Circle))?;
                    }
                    alphas.validate(p("alphas"))?;
                }
                Check::CircleDisintegration {
                    theta,
                    arcs,
                    tolerance,
                } => {
                    theta.validate(p("theta"), false)?;
                    validate_arcs(p("arcs"), arcs)?;
                    tol(tolerance)?;
                }
                Check::LineDisintegration {
                    model,
                    intervals,
                    window,
                    tolerance,
                } => {
                    model.validate(p("model"), Some(Kind::Line))?;
                    nonempty(p("intervals"), intervals)?;
                    build_intervals(&p("intervals"), intervals)?;
                    positive(p("window"), *window)?;
                    tol(tolerance)?;
                }
                Check::CurveDisintegration {
                    theta,
                    curve,
                    arcs,
                    tolerance,
                    ..
                } => {
                    theta.validate(p("theta"), true)?;
                    validate_curve(p("curve"), curve, Some(2))?;
                    validate_arcs(p("arcs"), arcs)?;
                    tol(tolerance)?;
                }
                Check::CurveMean {
                    theta,
                    curve,
                    points,
                    tolerance,
                    ..
                } => {
                    theta.validate(p("theta"), true)?;
                    validate_curve(p("curve"), curve, Some(2))?;
                    points.validate(p("points"))?;
                    tol(tolerance)?;
                }
                Check::ModelSpace { theta, alphas, .. } => {
                    theta.validate(p("theta"), true)?;
                    alphas.validate(p("alphas"))?;
                }
                Check::Lemma7 {
                    theta,
                    alphas,
                    points,
                    ..
                } => {
                    theta.validate(p("theta"), true)?;
                    alphas.validate(p("alphas"))?;
                    points.validate(p("points"))?;
                }
                Check::RankTwoOracle {
                    theta,
                    alphas,
                    betas,
                    points,
                    ..
                } => {
                    theta.validate(p("theta"), true)?;
                    alphas.validate(p("alphas"))?;
                    betas.validate(p("betas"))?;
                    points.validate(p("points"))?;
                }
                Check::Positivity {
                    theta,
                    alphas,
                    points,
                    curve,
                    ..
                } => {
                    theta.validate(p("theta"), true)?;
                    alphas.validate(p("alphas"))?;
                    points.validate(p("points"))?;
                    if let Some(c) = curve {
                        validate_curve(p("curve"), c, Some(2))?;
                    }
                }
                Check::SimonWolff {
                    measure,
                    probes,
                    expect,
                } => {
                    nonempty(p("probes"), probes)?;
                    if let Some(e) = expect {
                        if e.len() != probes.len() {
                            return Err(invalid(p("expect"), "needs one entry per probe"));
                        }
                    }
                    if measure.total_mass() <= 0.0 {
                        return Err(invalid(p("measure"), "must have positive mass"));
                    }
                }
                Check::RecursiveUnitary {
                    model,
                    vectors,
                    points,
                } => {
                    model.validate(p("model"), Some(Kind::Circle))?;
                    vectors.validate(p("vectors"), model.dim())?;
                    if *points == 0 {
                        return Err(invalid(p("points"), "must be positive"));
                    }
                }
                Check::AxisCriterion {
                    model,
                    vectors,
                    probes,
                    ..
                } => {
                    model.validate(p("model"), Some(Kind::Circle))?;
                    vectors.validate(p("vectors"), model.dim())?;
                    probes.validate(p("probes"))?;
                }
                Check::NullSet {
                    theta, curve, xis, ..
                } => {
                    theta.validate(p("theta"), true)?;
                    validate_curve(p("curve"), curve, Some(2))?;
                    xis.validate(p("xis"))?;
                }
                Check::Quadrature => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_scenario("{\n  \"name\": \"x\",\n  \"seed\": -1\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn validation_names_fields() {
        let text = r#"{"name":"x","seed":1,"checks":[{"check":"circle_disintegration","theta":{"monomial":2},"arcs":[[0,9]]}]}"#;
        match parse_scenario(text).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "checks[0].arcs[0]"),
            e => panic!("{e}"),
        }
        let text =
            r#"{"name":"x","seed":1,"tolerances":{"oracle":0},"checks":[{"check":"quadrature"}]}"#;
        match parse_scenario(text).unwrap_err() {
            Error::Validation { field, .. } => assert_eq!(field, "tolerances.oracle"),
            e => panic!("{e}"),
        }
    }
}
