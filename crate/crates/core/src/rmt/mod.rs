//! Unitarily invariant random matrices `X = eps U diag(d) U*`, their sums
//! and corners, Monte Carlo trace statistics, and exact Weingarten moments.

mod ensemble;
mod sample;
mod trace;
mod weingarten;

#[cfg(test)]
mod tests;

pub use ensemble::{Eigenvalues, EnsembleSpec, Scale, Spectrum};
pub use sample::{
    corner, eigen_decomposition, eigenvalues, haar_isometry, haar_unitary, normalized_power_trace,
    replica_rng, sample_corner, sample_matrix, sample_replica, sum_independent, CMatrix,
    HermitianSample,
};
pub use trace::{trace_statistics, Sampler, TraceTable};
pub use weingarten::{
    entry_moment_function, exact_entry_moment, weingarten_pseudo, weingarten_table,
    WeingartenTable, MAX_WEINGARTEN_K,
};
pub(crate) use weingarten::moment_from_function;
