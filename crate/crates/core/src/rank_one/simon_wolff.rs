use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::measures::{CircleAtomicMeasure, ExtendedReal, LineAtomicMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimonWolffProbe {
    pub probe: f64,
    pub value: ExtendedReal,
}

impl SimonWolffProbe {
    pub fn class(&self) -> Finiteness {
        if self.value.is_finite() {
            Finiteness::Finite
        } else {
            Finiteness::Infinite
        }
    }
}

/// `∫ dμ(x)/(x − y)²` at each probe `y`.
pub fn simon_wolff_classify(mu: &LineAtomicMeasure, probes: &[f64]) -> Vec<SimonWolffProbe> {
    probes
        .iter()
        .map(|&y| SimonWolffProbe {
            probe: y,
            value: mu.simon_wolff_integral(y),
        })
        .collect()
}

/// `∫ dν(ξ)/|ζ − ξ|²` at each probe angle.
pub fn simon_wolff_classify_circle(
    nu: &CircleAtomicMeasure,
    angles: &[f64],
) -> Result<Vec<SimonWolffProbe>> {
    angles
        .iter()
        .map(|&s| {
            Ok(SimonWolffProbe {
                probe: s,
                value: nu.simon_wolff_integral(Complex64::from_polar(1.0, s))?,
            })
        })
        .collect()
}
