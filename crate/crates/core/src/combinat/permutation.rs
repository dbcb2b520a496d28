use std::fmt;

use serde::{Deserialize, Serialize};

use super::SetPartition;
use crate::error::{Error, Result};

/// A permutation of `{0, .., k-1}` in one-line notation.
///
/// Composition follows function composition: `(p * q)(x) = p(q(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (0..k).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(Error::invalid(format!(
                    "{images:?} is not a permutation of 0..{k}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `0..k` from disjoint cycles (0-based).
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut touched = vec![false; k];
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x >= k || touched[x] {
                    return Err(Error::invalid(format!("bad cycle list {cycles:?} on 0..{k}")));
                }
                touched[x] = true;
                images[x] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.size()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::GroundSetMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    /// `s * self * s^-1`.
    pub fn conjugate_by(&self, s: &Permutation) -> Result<Self> {
        s.compose(self)?.compose(&s.inverse())
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.size();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    /// `k - #cycles`: the minimal number of transpositions needed to write `self`.
    pub fn length(&self) -> usize {
        self.size() - self.num_cycles()
    }

    /// The partition `C(p)` into cycles.
    pub fn cycle_partition(&self) -> SetPartition {
        SetPartition::from_blocks_unchecked(self.size(), &self.cycles())
    }

    /// Cycle lengths sorted in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// True when every cycle lies inside a block of `v`.
    pub fn refines(&self, v: &SetPartition) -> bool {
        self.size() == v.size() && (0..self.size()).all(|i| v.block_of(i) == v.block_of(self.images[i]))
    }

    /// All permutations of `0..k` in lexicographic one-line order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k);
        let mut used = vec![false; k];
        permutations_rec(k, &mut current, &mut used, &|_, _| true, &mut out);
        out
    }

    /// Permutations `p` with `p <= v`, in lexicographic one-line order.
    pub fn all_within(v: &SetPartition) -> Vec<Permutation> {
        let k = v.size();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k);
        let mut used = vec![false; k];
        permutations_rec(
            k,
            &mut current,
            &mut used,
            &|pos, x| v.block_of(pos) == v.block_of(x),
            &mut out,
        );
        out
    }
}

fn permutations_rec(
    k: usize,
    current: &mut Vec<usize>,
    used: &mut [bool],
    allowed: &dyn Fn(usize, usize) -> bool,
    out: &mut Vec<Permutation>,
) {
    let pos = current.len();
    if pos == k {
        out.push(Permutation {
            images: current.clone(),
        });
        return;
    }
    for x in 0..k {
        if !used[x] && allowed(pos, x) {
            used[x] = true;
            current.push(x);
            permutations_rec(k, current, used, allowed, out);
            current.pop();
            used[x] = false;
        }
    }
}

/// The permutation `(1..p1)(p1+1..p1+p2)...` with contiguous cycles of the given lengths.
pub fn gamma_perm(parts: &[usize]) -> Result<Permutation> {
    if parts.contains(&0) {
        return Err(Error::invalid("cycle lengths must be positive"));
    }
    let k: usize = parts.iter().sum();
    let mut images = Vec::with_capacity(k);
    let mut start = 0;
    for &p in parts {
        for j in 0..p {
            images.push(start + (j + 1) % p);
        }
        start += p;
    }
    Ok(Permutation { images })
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels, fixed points included.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            let labels: Vec<String> = cycle.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", labels.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}
