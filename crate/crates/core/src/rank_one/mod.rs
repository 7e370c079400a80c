//! Rank-one perturbation families of cyclic self-adjoint and unitary
//! operators, Clark families, and the identities tying them together.

pub mod clark;
pub mod disintegration;
pub mod inner;
pub mod model;
pub mod oracle;
pub mod perturb;
pub mod simon_wolff;

pub use clark::{
    clark_measure, verify_clark_correspondence, ClarkCorrespondenceReport, ClarkFamily,
};
pub use disintegration::{
    disintegration_check_circle, disintegration_check_line, DisintegrationEstimate,
};
pub use inner::{inner_from_selfadjoint, inner_from_unitary};
pub use model::{CyclicOperatorModel, Kind};
pub use oracle::{matrix_oracle_selfadjoint, matrix_oracle_unitary, spectral_measure_of_vector};
pub use perturb::{aronszajn_krein_eval, perturb_selfadjoint, perturb_unitary};
pub use simon_wolff::{
    simon_wolff_classify, simon_wolff_classify_circle, Finiteness, SimonWolffProbe,
};
