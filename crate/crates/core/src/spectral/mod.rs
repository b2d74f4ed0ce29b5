//! Three routes to `σ_r`, the root of `spr(L_{σ,r}) = 1`.

mod closed_form;
mod operator;
mod power;
mod solve;
mod word_sum;

pub use closed_form::closed_form_sigma;
pub use operator::{assemble_operator, Mesh, MeshFunction, OperatorMatrix};
pub use power::{spectral_radius, SpectralRadius};
pub use solve::{
    default_bracket, mesh_convergence, solve_sigma_spectral, SigmaMethod, SigmaSolveResult,
    WordSumDetail,
};
pub use word_sum::{level_sum, word_sum_sigma, BoundKind};

/// `s = σ / (r + σ)`.
pub fn exponent(sigma: f64, r: f64) -> f64 {
    sigma / (r + sigma)
}

/// Inverse of [`exponent`]: `σ = r s / (1 − s)`.
pub fn sigma_from_exponent(s: f64, r: f64) -> f64 {
    r * s / (1.0 - s)
}
