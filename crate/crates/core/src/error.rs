use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels and the scenario harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid Borel set: {0}")]
    InvalidSet(String),
    #[error("pole at {0}")]
    Pole(Complex64),
    #[error("point {point} outside the domain: {reason}")]
    Domain {
        point: Complex64,
        reason: &'static str,
    },
    #[error("numerator and denominator share the root {root} (residual {residual:e})")]
    CommonRoot { root: Complex64, residual: f64 },
    #[error("invalid rational function: {0}")]
    InvalidRational(String),
    #[error("invalid Blaschke product: {0}")]
    InvalidBlaschke(String),
    #[error(
        "root polish failed near {near} after {iterations} iterations (residual {residual:e})"
    )]
    RootPolish {
        near: Complex64,
        iterations: usize,
        residual: f64,
    },
    #[error("bracketing failed on ({lo}, {hi}): {reason}")]
    Bracketing { lo: f64, hi: f64, reason: String },
    #[error("derivative {value:e} too small at {at}")]
    DerivativeTooSmall { at: f64, value: f64 },
    #[error("{value} is a critical value: level set has a root of multiplicity {multiplicity}")]
    CriticalValue {
        value: Complex64,
        multiplicity: usize,
    },
    #[error("input is not a Herglotz function: {0}")]
    NotHerglotz(String),
    #[error("invalid operator model: {0}")]
    InvalidModel(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("theta(0) = {0} but this construction requires theta(0) = 0")]
    ThetaAtOriginNonzero(Complex64),
    #[error("model space construction failed: {0}")]
    ModelSpace(String),
    #[error("f(0) = {0} but this operation requires f(0) = 0")]
    NonzeroAtOrigin(Complex64),
    #[error("ill-conditioned system (condition number {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("vector {index} is not cyclic (Krylov rank {rank} < {dim})")]
    NotCyclic {
        index: usize,
        rank: usize,
        dim: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
    #[error("basis fingerprint mismatch: expected {expected}, found {found}")]
    Fingerprint { expected: String, found: String },
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("scenario validation failed for `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
