//! Exact representation theory of `U(n)` at the level of spectral data.
//!
//! Irreducibles are indexed by [`ShiftedWeight`]; highest weights appear
//! only at the API boundary. The scale `eps` is never stored in a weight and
//! enters only as a dilation of measures.

mod branching;
mod decompose;
mod measure;
mod stats;
mod weight;

pub use branching::{branch_chain, branch_one_step};
pub use decompose::{
    component_distribution, lr_tensor_decompose, pieri_decompose, sample_component, Component,
    WeightedDecomposition, MAX_COMPONENTS, MAX_LR_N, MAX_LR_SIZE,
};
pub use measure::{
    convert_moments, naive_spectral, natural_moment_via_matrix, natural_spectral,
    spectral_moments, zelobenko_weights, AtomicMeasure, Direction, SpectralKind,
};
pub use stats::{exact_pushforward_stats, exact_pushforward_stats_with, PushforwardStats};
pub use weight::ShiftedWeight;
