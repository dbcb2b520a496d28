//! Microscopic cumulants `kappa_(V, pi)`, the exact macro/micro relation for
//! trace cumulants, limit scans and commutator decay.

mod commutator;
mod kappa;
mod limits;
mod triangle;

#[cfg(test)]
mod tests;

pub use commutator::{commutator_decay_check, quadratic_casimir, CommutatorReport, CommutatorRow, COMMUTATOR_ORDERS};
pub use kappa::{
    compositions_up_to, kappa_exact, kappa_exact_pair, kappa_extended, kappa_mc, macro_from_micro,
    trace_cumulant_exact, verify_macro_micro, IdentityCheck, KappaTable, MAX_KAPPA_ORDER,
    MIN_KAPPA_REPLICAS,
};
pub use limits::{limit_scan, KappaLimit, LimitRecord, LimitTargets, MomentLimit, Trend};
pub use triangle::{exponent_table, triangle_check, TriangleRow};
