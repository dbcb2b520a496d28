//! Classical (tensor) cumulants over the set-partition lattice.
//!
//! Exact computations use [`Rational`](crate::scalar::Rational); estimators
//! work on `f64` or complex samples. The two are kept separate.

mod estimate;
mod matrix;
mod table;

pub use estimate::{
    bootstrap, estimate_cumulant_products, estimate_cumulants, joint_cumulant, BootstrapOptions, Estimate, SampleScalar,
    Samples, MAX_ESTIMATE_ORDER,
};
pub use matrix::{commutator_cumulant_check, matrix_moments, RatMatrix};
pub use table::{
    cumulants_to_moments, moments_to_cumulants, product_formula, CumulantTable, MomentTable,
    MAX_ORDER,
};
