//! Finite positive atomic measures on the real line and on the unit circle.
//!
//! These are the universal containers for spectral data in the crate: the
//! spectral measure of a cyclic vector, the perturbed families on the line,
//! and the Clark measures on the circle are all finite sums of point masses.
//! Construction sorts the atoms and merges positions closer than
//! [`MERGE_TOLERANCE`] (relative), summing their masses.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance below which two atom positions are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Tolerance used when deciding whether a boundary point is unimodular.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-10;

/// A nonnegative real number or `+∞`.
///
/// The Simon–Wolff integral of an atomic measure is infinite exactly at the
/// atoms, and that dichotomy has to be decidable, so infinity is a tag
/// rather than an overflowed float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    /// Float view, with `Infinite` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

fn same_position(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn check_atom(position: f64, mass: f64) -> Result<()> {
    if !position.is_finite() {
        return Err(Error::InvalidMeasure(format!(
            "atom position {position} is not finite"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidMeasure(format!(
            "atom mass {mass} at {position} is not a positive finite number"
        )));
    }
    Ok(())
}

/// Sort by position and merge clusters, mass-weighting the merged position.
fn normalize_atoms(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (x, m) in atoms {
        match merged.last_mut() {
            Some(last) if same_position(last.0, x) => {
                let total = last.1 + m;
                last.0 = (last.0 * last.1 + x * m) / total;
                last.1 = total;
            }
            _ => merged.push((x, m)),
        }
    }
    merged
}

/// Finite positive atomic measure on ℝ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineAtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

impl LineAtomicMeasure {
    /// Builds a measure from `(position, mass)` pairs.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            check_atom(x, m)?;
        }
        Ok(Self {
            atoms: normalize_atoms(atoms),
        })
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        Self {
            atoms: vec![(x, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn positions(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.1).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn measure_of(&self, pieces: &[Interval]) -> f64 {
        self.atoms
            .iter()
            .filter(|(x, _)| pieces.iter().any(|p| p.contains(*x)))
            .map(|a| a.1)
            .sum()
    }

    /// Whether `y` coincides with an atom (within the merge tolerance).
    pub fn is_atom(&self, y: f64) -> bool {
        self.atoms.iter().any(|&(x, _)| same_position(x, y))
    }

    /// `Σ mⱼ / (tⱼ − z)`.
    pub fn cauchy_transform(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, m) in &self.atoms {
            let d = Complex64::new(t, 0.0) - z;
            if d == Complex64::new(0.0, 0.0) {
                return Err(Error::Pole(z));
            }
            acc += m / d;
        }
        Ok(acc)
    }

    /// `Σ mⱼ / (tⱼ − y)²`, infinite when `y` is an atom.
    pub fn simon_wolff_integral(&self, y: f64) -> ExtendedReal {
        if self.is_atom(y) {
            return ExtendedReal::Infinite;
        }
        ExtendedReal::Finite(
            self.atoms
                .iter()
                .map(|&(t, m)| m / ((t - y) * (t - y)))
                .sum(),
        )
    }
}

/// Finite positive atomic measure on 𝕋, atoms stored by angle in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleAtomicMeasure {
    atoms: Vec<(f64, f64)>,
}

fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl CircleAtomicMeasure {
    /// Builds a measure from `(angle, mass)` pairs; angles are reduced mod 2π.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            check_atom(x, m)?;
        }
        let reduced = atoms
            .into_iter()
            .map(|(a, m)| (normalize_angle(a), m))
            .collect();
        let mut merged = normalize_atoms(reduced);
        // clusters straddling angle 0
        if merged.len() > 1 {
            let last = merged[merged.len() - 1];
            let first = merged[0];
            if angular_distance(last.0, first.0) <= MERGE_TOLERANCE * TAU {
                merged.pop();
                let total = first.1 + last.1;
                let pos = normalize_angle((first.0 * first.1 + (last.0 - TAU) * last.1) / total);
                merged[0] = (pos, total);
                merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
        }
        Ok(Self { atoms: merged })
    }

    /// Builds a measure from unimodular points and masses.
    pub fn from_points(points: &[(Complex64, f64)]) -> Result<Self> {
        for &(p, _) in points {
            if (p.norm() - 1.0).abs() > UNIMODULAR_TOLERANCE {
                return Err(Error::Domain {
                    point: p,
                    reason: "atom is not on the unit circle",
                });
            }
        }
        Self::new(points.iter().map(|&(p, m)| (p.arg(), m)).collect())
    }

    /// Unit point mass at `e^{i·angle}`.
    pub fn dirac(angle: f64) -> Self {
        Self {
            atoms: vec![(normalize_angle(angle), 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn angles(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.1).collect()
    }

    /// Atom locations as unimodular complex numbers.
    pub fn points(&self) -> Vec<Complex64> {
        self.atoms
            .iter()
            .map(|&(a, _)| Complex64::from_polar(1.0, a))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn measure_of(&self, pieces: &[Arc]) -> f64 {
        self.atoms
            .iter()
            .filter(|(a, _)| pieces.iter().any(|p| p.contains(*a)))
            .map(|a| a.1)
            .sum()
    }

    /// Multiplies each mass by `weight(point)`; atoms whose new mass is not
    /// positive are dropped.
    pub fn reweighted(&self, weight: impl Fn(Complex64) -> f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|&(a, m)| (a, m * weight(Complex64::from_polar(1.0, a))))
            .filter(|&(_, m)| m > 0.0)
            .collect();
        Self::new(atoms)
    }

    /// `Σ mⱼ / (1 − conj(ξⱼ) z)` for `|z| < 1`.
    pub fn cauchy_transform(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain {
                point: z,
                reason: "disk Cauchy transform needs |z| < 1",
            });
        }
        Ok(self
            .atoms
            .iter()
            .map(|&(a, m)| m / (1.0 - Complex64::from_polar(1.0, -a) * z))
            .sum())
    }

    /// `Σ mⱼ (1 − |z|²) / |ξⱼ − z|²` for `|z| < 1`.
    pub fn poisson_integral(&self, z: Complex64) -> Result<f64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain {
                point: z,
                reason: "Poisson integral needs |z| < 1",
            });
        }
        let w = 1.0 - z.norm_sqr();
        Ok(self
            .atoms
            .iter()
            .map(|&(a, m)| m * w / (Complex64::from_polar(1.0, a) - z).norm_sqr())
            .sum())
    }

    pub fn is_atom(&self, xi: Complex64) -> bool {
        self.atoms
            .iter()
            .any(|&(a, _)| (Complex64::from_polar(1.0, a) - xi).norm() <= MERGE_TOLERANCE * TAU)
    }

    /// `Σ mⱼ / |ξ − ξⱼ|²` for unimodular `ξ`, infinite at atoms.
    pub fn simon_wolff_integral(&self, xi: Complex64) -> Result<ExtendedReal> {
        if (xi.norm() - 1.0).abs() > UNIMODULAR_TOLERANCE {
            return Err(Error::Domain {
                point: xi,
                reason: "probe must lie on the unit circle",
            });
        }
        if self.is_atom(xi) {
            return Ok(ExtendedReal::Infinite);
        }
        Ok(ExtendedReal::Finite(
            self.atoms
                .iter()
                .map(|&(a, m)| m / (xi - Complex64::from_polar(1.0, a)).norm_sqr())
                .sum(),
        ))
    }
}

/// Closed interval `[lo, hi]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidSet(format!(
                "[{lo}, {hi}] is not a bounded interval"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Closed arc `{e^{is} : s ∈ [start, start + length]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(start.is_finite() && length.is_finite() && (0.0..=TAU).contains(&length)) {
            return Err(Error::InvalidSet(format!(
                "arc (start {start}, length {length}) needs 0 ≤ length ≤ 2π"
            )));
        }
        Ok(Self {
            start: normalize_angle(start),
            length,
        })
    }

    pub fn full() -> Self {
        Self {
            start: 0.0,
            length: TAU,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn contains(&self, angle: f64) -> bool {
        let slack = 8.0 * f64::EPSILON * TAU;
        let d = (angle - self.start).rem_euclid(TAU);
        d <= self.length + slack || d >= TAU - slack
    }

    /// Normalized arc length `m(arc)`.
    pub fn normalized_length(&self) -> f64 {
        self.length / TAU
    }
}

/// Finite union of disjoint closed intervals or arcs.
#[derive(Debug, Clone, PartialEq)]
pub enum BorelSetSpec {
    Line(Vec<Interval>),
    Circle(Vec<Arc>),
}

impl BorelSetSpec {
    pub fn line(mut pieces: Vec<Interval>) -> Result<Self> {
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[0].hi >= w[1].lo {
                return Err(Error::InvalidSet(format!(
                    "intervals [{}, {}] and [{}, {}] overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(BorelSetSpec::Line(pieces))
    }

    pub fn circle(pieces: Vec<Arc>) -> Result<Self> {
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                if a.contains(b.start) || b.contains(a.start) {
                    return Err(Error::InvalidSet(format!(
                        "arcs starting at {} and {} overlap",
                        a.start, b.start
                    )));
                }
            }
        }
        let total: f64 = pieces.iter().map(|a| a.length).sum();
        if total > TAU * (1.0 + 1e-12) {
            return Err(Error::InvalidSet("arcs cover more than the circle".into()));
        }
        Ok(BorelSetSpec::Circle(pieces))
    }

    /// Lebesgue length `|B|` on the line, normalized length `m(B)` on 𝕋.
    pub fn size(&self) -> f64 {
        match self {
            BorelSetSpec::Line(p) => p.iter().map(Interval::length).sum(),
            BorelSetSpec::Circle(p) => p.iter().map(Arc::normalized_length).sum(),
        }
    }
}

/// Either kind of atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomicMeasure {
    Line(LineAtomicMeasure),
    Circle(CircleAtomicMeasure),
}

impl AtomicMeasure {
    pub fn total_mass(&self) -> f64 {
        match self {
            AtomicMeasure::Line(m) => m.total_mass(),
            AtomicMeasure::Circle(m) => m.total_mass(),
        }
    }

    pub fn measure_of(&self, set: &BorelSetSpec) -> Result<f64> {
        match (self, set) {
            (AtomicMeasure::Line(m), BorelSetSpec::Line(p)) => Ok(m.measure_of(p)),
            (AtomicMeasure::Circle(m), BorelSetSpec::Circle(p)) => Ok(m.measure_of(p)),
            _ => Err(Error::InvalidSet(
                "set and measure live on different spaces".into(),
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Space {
    Line,
    Circle,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    space: Space,
    atoms: Vec<[f64; 2]>,
}

impl Serialize for AtomicMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (space, atoms) = match self {
            AtomicMeasure::Line(m) => (Space::Line, m.atoms()),
            AtomicMeasure::Circle(m) => (Space::Circle, m.atoms()),
        };
        MeasureRepr {
            space,
            atoms: atoms.iter().map(|&(x, m)| [x, m]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AtomicMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        let atoms: Vec<(f64, f64)> = repr.atoms.iter().map(|a| (a[0], a[1])).collect();
        match repr.space {
            Space::Line => LineAtomicMeasure::new(atoms).map(AtomicMeasure::Line),
            Space::Circle => CircleAtomicMeasure::new(atoms).map(AtomicMeasure::Circle),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl From<LineAtomicMeasure> for AtomicMeasure {
    fn from(m: LineAtomicMeasure) -> Self {
        AtomicMeasure::Line(m)
    }
}

impl From<CircleAtomicMeasure> for AtomicMeasure {
    fn from(m: CircleAtomicMeasure) -> Self {
        AtomicMeasure::Circle(m)
    }
}
