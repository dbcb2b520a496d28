use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Permutation, SetPartition};
use crate::error::{Error, Result};

/// Largest ground set accepted by [`enumerate_pp`].
pub const MAX_ENUMERATION_K: usize = 8;

/// A pair `(V, pi)` where every cycle of `pi` lies inside a block of `V`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionedPermutation {
    partition: SetPartition,
    permutation: Permutation,
}

/// Conjugacy invariant: for each block, the sorted cycle lengths inside it;
/// blocks sorted. Two partitioned permutations are conjugate iff their keys agree.
pub type ConjugacyKey = Vec<Vec<usize>>;

impl PartitionedPermutation {
    pub fn new(partition: SetPartition, permutation: Permutation) -> Result<Self> {
        if partition.size() != permutation.size() {
            return Err(Error::GroundSetMismatch {
                left: partition.size(),
                right: permutation.size(),
            });
        }
        if !permutation.refines(&partition) {
            return Err(Error::invalid(format!(
                "permutation {permutation} is not below partition {partition}"
            )));
        }
        Ok(PartitionedPermutation {
            partition,
            permutation,
        })
    }

    /// `(0, pi) = (C(pi), pi)`.
    pub fn minimal(permutation: Permutation) -> Self {
        PartitionedPermutation {
            partition: permutation.cycle_partition(),
            permutation,
        }
    }

    /// `(1_k, pi)`.
    pub fn full(permutation: Permutation) -> Self {
        PartitionedPermutation {
            partition: SetPartition::coarsest(permutation.size()),
            permutation,
        }
    }

    pub fn identity(k: usize) -> Self {
        Self::minimal(Permutation::identity(k))
    }

    pub fn size(&self) -> usize {
        self.permutation.size()
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    /// `|pi| + 2(#pi - #V)`.
    pub fn length(&self) -> usize {
        self.permutation.length() + 2 * (self.permutation.num_cycles() - self.partition.num_blocks())
    }

    /// `(V_a v V_b, pi_a pi_b)` when lengths add up, `None` otherwise.
    pub fn product(&self, other: &PartitionedPermutation) -> Result<Option<PartitionedPermutation>> {
        let partition = self.partition.join(&other.partition)?;
        let permutation = self.permutation.compose(&other.permutation)?;
        // pi_a pi_b <= V_a v V_b always holds, so the pair is a valid element
        let candidate = PartitionedPermutation {
            partition,
            permutation,
        };
        Ok((self.length() + other.length() == candidate.length()).then_some(candidate))
    }

    /// `a <= b` iff `a * (0, pi_a^-1 pi_b)` is defined and equals `b`.
    pub fn leq(&self, other: &PartitionedPermutation) -> Result<bool> {
        let step = self.permutation.inverse().compose(&other.permutation)?;
        Ok(self
            .product(&PartitionedPermutation::minimal(step))?
            .is_some_and(|p| &p == other))
    }

    /// Relabeling by `s`: `pi -> s pi s^-1`, blocks mapped through `s`.
    pub fn conjugate(&self, s: &Permutation) -> Result<PartitionedPermutation> {
        Ok(PartitionedPermutation {
            partition: self.partition.relabel(s)?,
            permutation: self.permutation.conjugate_by(s)?,
        })
    }

    pub fn conjugacy_key(&self) -> ConjugacyKey {
        let cycles = self.permutation.cycles();
        let mut key: Vec<Vec<usize>> = self
            .partition
            .blocks()
            .iter()
            .map(|b| {
                let mut lens: Vec<usize> = cycles
                    .iter()
                    .filter(|c| self.partition.same_block(c[0], b[0]))
                    .map(Vec::len)
                    .collect();
                lens.sort_unstable_by(|x, y| y.cmp(x));
                lens
            })
            .collect();
        key.sort_unstable_by(|x, y| y.cmp(x));
        key
    }

    /// Searches for `s` with `self.conjugate(s) == other`.
    ///
    /// The key comparison prunes most pairs; surviving pairs are searched
    /// exhaustively over `S_k`, which is bounded by [`MAX_ENUMERATION_K`].
    pub fn find_conjugator(&self, other: &PartitionedPermutation) -> Result<Option<Permutation>> {
        if self.size() != other.size() {
            return Err(Error::GroundSetMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        if self.size() > MAX_ENUMERATION_K {
            return Err(Error::guard(format!(
                "conjugacy search is limited to k <= {MAX_ENUMERATION_K}"
            )));
        }
        if self.conjugacy_key() != other.conjugacy_key() {
            return Ok(None);
        }
        for s in Permutation::all(self.size()) {
            if &self.conjugate(&s)? == other {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    pub fn is_conjugate(&self, other: &PartitionedPermutation) -> Result<bool> {
        Ok(self.find_conjugator(other)?.is_some())
    }
}

/// All partitioned permutations of `0..k`, ordered lexicographically by
/// (canonical partition, one-line permutation).
pub fn enumerate_pp(k: usize) -> Result<impl Iterator<Item = PartitionedPermutation>> {
    if k > MAX_ENUMERATION_K {
        return Err(Error::guard(format!(
            "enumeration of partitioned permutations is limited to k <= {MAX_ENUMERATION_K} (requested {k})"
        )));
    }
    Ok(SetPartition::all(k).into_iter().flat_map(|v| {
        Permutation::all_within(&v)
            .into_iter()
            .map(move |p| PartitionedPermutation {
                partition: v.clone(),
                permutation: p,
            })
    }))
}

/// `|(0, gamma pi^-1)| + |(V, pi)| - |(1_k, gamma)|`: the power of `1/n`
/// attached to `(V, pi)` in the scaled macro/micro relation.
pub fn scaling_exponent(vp: &PartitionedPermutation, gamma: &Permutation) -> Result<i64> {
    let step = gamma.compose(&vp.permutation.inverse())?;
    let full = PartitionedPermutation::full(gamma.clone());
    Ok(step.length() as i64 + vp.length() as i64 - full.length() as i64)
}

impl fmt::Display for PartitionedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.partition, self.permutation)
    }
}

impl fmt::Debug for PartitionedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PP{self}")
    }
}
