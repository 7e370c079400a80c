//! Finite-dimensional model spaces `K_θ`, the Clark operators on them, and
//! the `f₀f̂₀ = g + θh` splitting.

pub mod clark_operator;
pub mod decomposition;
pub mod space;

pub use clark_operator::{
    hat_conjugate, intertwine_check, spectral_consistency, t_alpha_matrix, v_alpha, v_alpha_matrix,
    v_alpha_star, v_alpha_unitarity,
};
pub use decomposition::{lemma7_decompose, mu_one_defect, Lemma7, Lemma7Values};
pub use space::{ModelSpace, ModelVector};

/// Builds the model space of `θ`.
pub fn build_model_space(theta: crate::herglotz::BlaschkeProduct) -> crate::Result<ModelSpace> {
    ModelSpace::new(theta)
}
