//! Exact and Monte-Carlo tools relating representations of `U(n)` to
//! unitarily invariant random matrices.
//!
//! * [`combinat`]: permutations, set partitions, partitioned permutations.
//! * [`cumulants`]: classical (tensor) cumulants over the partition lattice.
//! * [`freeprob`]: non-crossing moment/cumulant transforms, free convolution and compression.
//! * [`repunitary`]: shifted weights, spectral measures, tensor and branching decompositions.
//! * [`rmt`]: Haar unitaries, invariant ensembles, Weingarten calculus.
//! * [`hof`]: partitioned-permutation cumulant tables and the macro/micro relation.
//! * [`experiments`]: the end-to-end comparisons exposed by the command line.

pub mod combinat;
pub mod cumulants;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod freeprob;
pub mod hof;
pub mod repunitary;
pub mod rmt;
pub mod scalar;

pub use error::{Error, Result};
