use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cvector, CMatrix, CVector};
use crate::measures::{AtomicMeasure, CircleAtomicMeasure, LineAtomicMeasure};

/// Tolerance on `Σ weights = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Line,
    Circle,
}

/// A cyclic operator in diagonal form: multiplication by the sites (real
/// eigenvalues, or angles of unimodular ones) with cyclic unit vector
/// `φ = (√w₁, …, √w_N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicOperatorModel {
    kind: Kind,
    sites: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    kind: Kind,
    sites: Vec<f64>,
    weights: Vec<f64>,
}

impl<'de> Deserialize<'de> for CyclicOperatorModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ModelRepr::deserialize(d)?;
        CyclicOperatorModel::new(r.kind, r.sites, r.weights).map_err(serde::de::Error::custom)
    }
}

impl CyclicOperatorModel {
    pub fn new(kind: Kind, sites: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidModel("no sites".into()));
        }
        if sites.len() != weights.len() {
            return Err(Error::InvalidModel(format!(
                "{} sites but {} weights",
                sites.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidModel(format!("weight {w} is not positive")));
        }
        if let Some(s) = sites.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidModel(format!("site {s} is not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let mut keys: Vec<f64> = match kind {
            Kind::Line => sites.clone(),
            Kind::Circle => sites.iter().map(|s| s.rem_euclid(TAU)).collect(),
        };
        keys.sort_by(f64::total_cmp);
        let coincide = keys.windows(2).any(|w| w[0] == w[1])
            || (kind == Kind::Circle && keys.len() > 1 && keys[0] + TAU == keys[keys.len() - 1]);
        if coincide {
            return Err(Error::InvalidModel("sites are not distinct".into()));
        }
        Ok(Self {
            kind,
            sites,
            weights,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn sites(&self) -> &[f64] {
        &self.sites
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    fn require(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidModel(format!(
                "expected a {kind:?} model, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn line_measure(&self) -> Result<LineAtomicMeasure> {
        self.require(Kind::Line)?;
        LineAtomicMeasure::new(
            self.sites
                .iter()
                .copied()
                .zip(self.weights.iter().copied())
                .collect(),
        )
    }

    pub fn circle_measure(&self) -> Result<CircleAtomicMeasure> {
        self.require(Kind::Circle)?;
        CircleAtomicMeasure::new(
            self.sites
                .iter()
                .copied()
                .zip(self.weights.iter().copied())
                .collect(),
        )
    }

    /// The spectral measure of the cyclic vector: atoms at the sites.
    pub fn spectral_measure(&self) -> AtomicMeasure {
        match self.kind {
            Kind::Line => self.line_measure().expect("validated").into(),
            Kind::Circle => self.circle_measure().expect("validated").into(),
        }
    }

    pub fn cyclic_vector(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `diag(sites)` for a line model.
    pub fn real_matrix(&self) -> Result<DMatrix<f64>> {
        self.require(Kind::Line)?;
        Ok(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(&self.sites),
        ))
    }

    /// `diag(e^{i·sites})` for a circle model.
    pub fn unitary_matrix(&self) -> Result<CMatrix> {
        self.require(Kind::Circle)?;
        let diag: Vec<Complex64> = self
            .sites
            .iter()
            .map(|&s| Complex64::from_polar(1.0, s))
            .collect();
        Ok(CMatrix::from_diagonal(&cvector(&diag)))
    }

    pub fn cyclic_vector_complex(&self) -> CVector {
        crate::linalg::real_to_complex(&self.cyclic_vector())
    }
}
