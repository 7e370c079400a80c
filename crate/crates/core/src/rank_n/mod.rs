//! Rank-n unitary perturbations built recursively, analytic curves in `𝕋ⁿ`,
//! and the rank-two closed forms with their oracle harnesses.

pub mod checks;
pub mod curve;
pub mod family;
pub mod two;

pub use checks::{
    curve_disintegration_check, curve_mean_transform, theorem4_axis_criterion,
    theorem9_nullset_check, AxisReport, CurveDisintegrationReport, NullSetReport,
};
pub use curve::{curve_sample, AnalyticCurve};
pub use family::RankNPerturbationFamily;
pub use two::{herglotz_positivity_check, RankTwoSetup};
