//! Permutations, set partitions and partitioned permutations.

mod partitioned;
mod permutation;
mod set_partition;

pub use partitioned::{
    enumerate_pp, scaling_exponent, ConjugacyKey, PartitionedPermutation, MAX_ENUMERATION_K,
};
pub use permutation::{gamma_perm, Permutation};
pub use set_partition::{mobius, SetPartition};
