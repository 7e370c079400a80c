//! Roots of the secular equation `K(x) = −1/λ` for `K(x) = Σ mⱼ/(tⱼ − x)`.
//!
//! `K` is strictly increasing between consecutive poles, so every root has
//! a guaranteed bracket. Each root is located in coordinates shifted to its
//! nearest pole, `x = t_o + δ`, which keeps the small differences `tⱼ − x`
//! free of cancellation; Newton steps are safeguarded by bisection.

use num_complex::Complex64;

use super::rational::HerglotzRational;
use crate::error::{Error, Result};

/// Relative residual target `|K(x) + 1/λ| ≤ RESIDUAL_TOLERANCE·|1/λ|`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Smallest admissible `K′(x)` when turning a root into a mass.
pub const MIN_DERIVATIVE: f64 = 1e-14;

const MAX_ITERATIONS: usize = 200;

/// A secular root written as `atoms[origin].0 + delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedRoot {
    pub origin: usize,
    pub delta: f64,
}

impl ShiftedRoot {
    pub fn position(&self, atoms: &[(f64, f64)]) -> f64 {
        atoms[self.origin].0 + self.delta
    }
}

/// `(K, K′)` at `t_o + δ`.
fn eval_shifted(atoms: &[(f64, f64)], origin: usize, delta: f64) -> (f64, f64) {
    let to = atoms[origin].0;
    let mut k = 0.0;
    let mut dk = 0.0;
    for (j, &(t, m)) in atoms.iter().enumerate() {
        // (t − t_o) is exact for neighbouring atoms (Sterbenz) and
        // accurate to rounding otherwise
        let d = if j == origin {
            -delta
        } else {
            (t - to) - delta
        };
        let inv = 1.0 / d;
        k += m * inv;
        dk += m * inv * inv;
    }
    (k, dk)
}

/// Solves `K(t_o + δ) = target` for δ on the open bracket `(lo, hi)`, where
/// the residual is negative at `lo` and positive at `hi` (one side may be
/// the pole itself, `δ = 0`).
fn solve_bracketed(
    atoms: &[(f64, f64)],
    origin: usize,
    target: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    let tol = RESIDUAL_TOLERANCE * target.abs();
    let to = atoms[origin].0;
    let mut delta = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let (k, dk) = eval_shifted(atoms, origin, delta);
        let r = k - target;
        if !r.is_finite() {
            return Err(Error::Bracketing {
                lo: to + lo,
                hi: to + hi,
                reason: format!("non-finite residual at {}", to + delta),
            });
        }
        if r.abs() <= tol {
            // One more Newton step is free accuracy once inside the basin.
            let polished = delta - r / dk;
            return Ok(if polished > lo && polished < hi {
                polished
            } else {
                delta
            });
        }
        if r < 0.0 {
            lo = delta;
        } else {
            hi = delta;
        }
        // The interval has collapsed to adjacent floats of x = t_o + δ.
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * (to + delta).abs().max(delta.abs()) || width == 0.0 {
            return Ok(delta);
        }
        let newton = delta - r / dk;
        if newton > lo && newton < hi && dk > 0.0 {
            // Newton may approach monotonically from one side, leaving the
            // bracket wide; a negligible step also means convergence.
            if (newton - delta).abs() <= 2.0 * f64::EPSILON * (to + delta).abs().max(delta.abs()) {
                return Ok(newton);
            }
            delta = newton;
        } else {
            delta = 0.5 * (lo + hi);
        }
    }
    Err(Error::Bracketing {
        lo: to + lo,
        hi: to + hi,
        reason: format!("no convergence in {MAX_ITERATIONS} iterations"),
    })
}

/// All `N` roots of `Σ mⱼ/(tⱼ − x) = −1/λ` in shifted form, ascending.
/// `atoms` must be sorted with distinct positions and positive masses.
pub fn secular_roots_shifted(atoms: &[(f64, f64)], lambda: f64) -> Result<Vec<ShiftedRoot>> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain {
            point: Complex64::new(lambda, 0.0),
            reason: "coupling constant must be finite and nonzero",
        });
    }
    let n = atoms.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    for w in atoms.windows(2) {
        if !(w[0].0 < w[1].0) {
            return Err(Error::Bracketing {
                lo: w[0].0,
                hi: w[1].0,
                reason: "atoms not strictly increasing".into(),
            });
        }
    }
    let target = -1.0 / lambda;
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mut roots = Vec::with_capacity(n);

    if lambda < 0.0 {
        // K(x) ≤ M/(t₁ − x) below the bottom atom, so the root lies within |λ|M
        // (with equality for a single atom, hence the open bracket at 2λM).
        let delta = solve_bracketed(atoms, 0, target, 2.0 * lambda * total, 0.0)?;
        roots.push(ShiftedRoot { origin: 0, delta });
    }
    for k in 0..n - 1 {
        let gap = atoms[k + 1].0 - atoms[k].0;
        let (kmid, _) = eval_shifted(atoms, k, 0.5 * gap);
        let root = if kmid - target > 0.0 {
            ShiftedRoot {
                origin: k,
                delta: solve_bracketed(atoms, k, target, 0.0, 0.5 * gap)?,
            }
        } else {
            ShiftedRoot {
                origin: k + 1,
                delta: solve_bracketed(atoms, k + 1, target, -0.5 * gap, 0.0)?,
            }
        };
        roots.push(root);
    }
    if lambda > 0.0 {
        let delta = solve_bracketed(atoms, n - 1, target, 0.0, 2.0 * lambda * total)?;
        roots.push(ShiftedRoot {
            origin: n - 1,
            delta,
        });
    }
    Ok(roots)
}

/// Zeros of `K` (the `λ → ∞` limits of the interior secular roots), one
/// strictly between each pair of consecutive atoms, with `K′` there.
pub fn cauchy_zeros(atoms: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(atoms.len().saturating_sub(1));
    for k in 0..atoms.len().saturating_sub(1) {
        let gap = atoms[k + 1].0 - atoms[k].0;
        let (kmid, _) = eval_shifted(atoms, k, 0.5 * gap);
        let (origin, delta) = if kmid > 0.0 {
            (k, solve_bracketed(atoms, k, 0.0, 0.0, 0.5 * gap)?)
        } else {
            (k + 1, solve_bracketed(atoms, k + 1, 0.0, -0.5 * gap, 0.0)?)
        };
        let (_, dk) = eval_shifted(atoms, origin, delta);
        out.push((atoms[origin].0 + delta, dk));
    }
    Ok(out)
}

/// `(K, K′)` at a real point off the atoms.
pub fn eval_real(atoms: &[(f64, f64)], x: f64) -> (f64, f64) {
    atoms.iter().fold((0.0, 0.0), |(k, dk), &(t, m)| {
        let inv = 1.0 / (t - x);
        (k + m * inv, dk + m * inv * inv)
    })
}

/// Mass `1/(λ²K′(x))` of the perturbed measure at a shifted root.
pub fn residue_mass_shifted(atoms: &[(f64, f64)], lambda: f64, root: ShiftedRoot) -> Result<f64> {
    let (_, dk) = eval_shifted(atoms, root.origin, root.delta);
    if !(dk >= MIN_DERIVATIVE) {
        return Err(Error::DerivativeTooSmall {
            at: root.position(atoms),
            value: dk,
        });
    }
    Ok(1.0 / (lambda * lambda * dk))
}

/// Recovers the atoms of a line measure from its Cauchy transform.
pub fn line_atoms_of(k: &HerglotzRational) -> Result<Vec<(f64, f64)>> {
    if let Some(atoms) = k.line_atoms() {
        return Ok(atoms);
    }
    let num = k.numerator();
    let den = k.denominator();
    if num.degree() >= den.degree() && !num.is_zero() && den.degree() > 0 {
        return Err(Error::NotHerglotz(
            "transform does not vanish at infinity".into(),
        ));
    }
    let dden = den.derivative();
    let mut atoms = Vec::new();
    for p in den.roots()? {
        if p.im.abs() > 1e-10 * p.norm().max(1.0) {
            return Err(Error::NotHerglotz(format!("non-real pole {p}")));
        }
        let residue = num.eval(p) / dden.eval(p);
        if residue.re >= 0.0 || residue.im.abs() > 1e-10 * residue.norm() {
            return Err(Error::NotHerglotz(format!(
                "residue {residue} at {p} is not negative real"
            )));
        }
        atoms.push((p.re, -residue.re));
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(atoms)
}

/// All real solutions of `K(x) = −1/λ`, ascending: one strictly between
/// each pair of consecutive atoms and one beyond the top atom (`λ > 0`) or
/// below the bottom atom (`λ < 0`).
pub fn secular_roots_line(k: &HerglotzRational, lambda: f64) -> Result<Vec<f64>> {
    let atoms = line_atoms_of(k)?;
    Ok(secular_roots_shifted(&atoms, lambda)?
        .into_iter()
        .map(|r| r.position(&atoms))
        .collect())
}

/// Point masses `1/(λ²K′(x))` of `μ_λ` at the given secular roots.
pub fn residue_masses_line(k: &HerglotzRational, lambda: f64, roots: &[f64]) -> Result<Vec<f64>> {
    let atoms = line_atoms_of(k)?;
    roots
        .iter()
        .map(|&x| {
            // Shift to the nearest atom, as the solver does.
            let origin = nearest_atom(&atoms, x);
            let root = ShiftedRoot {
                origin,
                delta: x - atoms[origin].0,
            };
            residue_mass_shifted(&atoms, lambda, root)
        })
        .collect()
}

fn nearest_atom(atoms: &[(f64, f64)], x: f64) -> usize {
    let i = atoms.partition_point(|a| a.0 < x);
    match i {
        0 => 0,
        i if i == atoms.len() => i - 1,
        i if (atoms[i].0 - x) < (x - atoms[i - 1].0) => i,
        i => i - 1,
    }
}
