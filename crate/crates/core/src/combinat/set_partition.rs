use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set partition of `{0, .., k-1}` in canonical form: each element maps to
/// the smallest element of its block.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartition {
    block_of: Vec<usize>,
}

impl SetPartition {
    /// `0_k`, all singletons.
    pub fn finest(k: usize) -> Self {
        SetPartition {
            block_of: (0..k).collect(),
        }
    }

    /// `1_k`, one block.
    pub fn coarsest(k: usize) -> Self {
        SetPartition {
            block_of: vec![0; k],
        }
    }

    pub fn from_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut seen = vec![false; k];
        for b in blocks {
            if b.is_empty() {
                return Err(Error::invalid("empty block"));
            }
            for &x in b {
                if x >= k || seen[x] {
                    return Err(Error::invalid(format!("{blocks:?} is not a partition of 0..{k}")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid(format!("{blocks:?} does not cover 0..{k}")));
        }
        Ok(Self::from_blocks_unchecked(k, blocks))
    }

    pub(crate) fn from_blocks_unchecked<B: AsRef<[usize]>>(k: usize, blocks: &[B]) -> Self {
        let mut block_of = vec![0; k];
        for b in blocks {
            let b = b.as_ref();
            let min = *b.iter().min().expect("nonempty block");
            for &x in b {
                block_of[x] = min;
            }
        }
        SetPartition { block_of }
    }

    /// Builds from arbitrary labels; elements with equal labels share a block.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut first: HashMap<&L, usize> = HashMap::new();
        let block_of = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(l).or_insert(i))
            .collect();
        SetPartition { block_of }
    }

    pub fn size(&self) -> usize {
        self.block_of.len()
    }

    /// Canonical block id (smallest element of the block).
    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn canonical(&self) -> &[usize] {
        &self.block_of
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of
            .iter()
            .enumerate()
            .filter(|(i, &b)| *i == b)
            .count()
    }

    /// `k - #blocks`.
    pub fn length(&self) -> usize {
        self.size() - self.num_blocks()
    }

    /// Blocks as sorted element lists, ordered by their minima.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let k = self.size();
        let mut index = vec![usize::MAX; k];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..k {
            let b = self.block_of[x];
            if index[b] == usize::MAX {
                index[b] = out.len();
                out.push(Vec::new());
            }
            out[index[b]].push(x);
        }
        out
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    fn check_same_size(&self, other: &SetPartition) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::GroundSetMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(())
    }

    /// Refinement order: every block of `self` lies in a block of `other`.
    pub fn leq(&self, other: &SetPartition) -> bool {
        self.size() == other.size()
            && (0..self.size()).all(|x| other.same_block(x, self.block_of[x]))
    }

    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_same_size(other)?;
        let k = self.size();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for x in 0..k {
            for root in [self.block_of[x], other.block_of[x]] {
                let a = find(&mut parent, x);
                let b = find(&mut parent, root);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let labels: Vec<usize> = (0..k).map(|x| find(&mut parent, x)).collect();
        Ok(SetPartition::from_labels(&labels))
    }

    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        self.check_same_size(other)?;
        let labels: Vec<(usize, usize)> = (0..self.size())
            .map(|x| (self.block_of[x], other.block_of[x]))
            .collect();
        Ok(SetPartition::from_labels(&labels))
    }

    /// Image of the partition under relabeling `x -> s(x)`.
    pub fn relabel(&self, s: &super::Permutation) -> Result<SetPartition> {
        if s.size() != self.size() {
            return Err(Error::GroundSetMismatch {
                left: self.size(),
                right: s.size(),
            });
        }
        let mut labels = vec![0; self.size()];
        for x in 0..self.size() {
            labels[s.apply(x)] = self.block_of[x];
        }
        Ok(SetPartition::from_labels(&labels))
    }

    /// Restriction to a subset, relabeled to `0..subset.len()` in the given order.
    pub fn restrict(&self, subset: &[usize]) -> SetPartition {
        let labels: Vec<usize> = subset.iter().map(|&x| self.block_of[x]).collect();
        SetPartition::from_labels(&labels)
    }

    /// Every partition of `0..k`, in lexicographic order of the canonical form.
    pub fn all(k: usize) -> Vec<SetPartition> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(k);
        all_rec(k, &mut current, &mut out);
        out
    }

    /// Partitions `c` with `self <= c`.
    pub fn coarsenings(&self) -> Vec<SetPartition> {
        let blocks = self.blocks();
        SetPartition::all(blocks.len())
            .into_iter()
            .map(|q| {
                let mut labels = vec![0; self.size()];
                for (bi, b) in blocks.iter().enumerate() {
                    for &x in b {
                        labels[x] = q.block_of(bi);
                    }
                }
                SetPartition::from_labels(&labels)
            })
            .collect()
    }

    /// Partitions `c` with `c <= self`.
    pub fn refinements(&self) -> Vec<SetPartition> {
        let blocks = self.blocks();
        let mut out = vec![Vec::<Vec<usize>>::new()];
        for b in &blocks {
            let sub = SetPartition::all(b.len());
            let mut next = Vec::with_capacity(out.len() * sub.len());
            for prefix in &out {
                for q in &sub {
                    let mut blocks_acc = prefix.clone();
                    for qb in q.blocks() {
                        blocks_acc.push(qb.iter().map(|&i| b[i]).collect());
                    }
                    next.push(blocks_acc);
                }
            }
            out = next;
        }
        let mut parts: Vec<SetPartition> = out
            .iter()
            .map(|bl| SetPartition::from_blocks_unchecked(self.size(), bl))
            .collect();
        parts.sort();
        parts
    }

    /// True for partitions whose blocks are runs of consecutive elements.
    pub fn is_interval(&self) -> bool {
        self.blocks()
            .iter()
            .all(|b| b.windows(2).all(|w| w[1] == w[0] + 1))
    }
}

fn all_rec(k: usize, current: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
    let pos = current.len();
    if pos == k {
        out.push(SetPartition {
            block_of: current.clone(),
        });
        return;
    }
    // existing block ids are minima already placed; a new block gets id `pos`
    let mut ids: Vec<usize> = current
        .iter()
        .enumerate()
        .filter(|(i, &b)| *i == b)
        .map(|(i, _)| i)
        .collect();
    ids.push(pos);
    for b in ids {
        current.push(b);
        all_rec(k, current, out);
        current.pop();
    }
}

fn mobius_cache() -> &'static Mutex<HashMap<Vec<usize>, i64>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `mu(0_m, 1_m)` by the defining recursion `sum_{0 <= c <= 1} mu(0, c) = 0`.
fn mobius_full(m: usize) -> i64 {
    if m <= 1 {
        return 1;
    }
    mobius_of_type(&[m; 1])
}

/// Mobius value of an interval isomorphic to a product of full lattices `Pi_{m_i}`.
/// The key is the sorted multiset of the `m_i`.
fn mobius_of_type(sizes: &[usize]) -> i64 {
    let mut key: Vec<usize> = sizes.iter().copied().filter(|&m| m > 1).collect();
    key.sort_unstable();
    if key.is_empty() {
        return 1;
    }
    if let Some(&v) = mobius_cache().lock().unwrap().get(&key) {
        return v;
    }
    let value = if key.len() > 1 {
        key.iter().map(|&m| mobius_full(m)).product()
    } else {
        let m = key[0];
        // mu(0,1) = -sum_{c < 1} mu(0,c); each proper c contributes the product over its blocks
        -SetPartition::all(m)
            .iter()
            .filter(|c| c.num_blocks() > 1)
            .map(|c| {
                let sizes: Vec<usize> = c.blocks().iter().map(Vec::len).collect();
                mobius_of_type(&sizes)
            })
            .sum::<i64>()
    };
    mobius_cache().lock().unwrap().insert(key, value);
    value
}

/// Mobius function `mu(a, b)` of the partition lattice.
pub fn mobius(a: &SetPartition, b: &SetPartition) -> Result<i64> {
    if a.size() != b.size() {
        return Err(Error::GroundSetMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    if !a.leq(b) {
        return Err(Error::invalid(format!("{a} is not below {b}")));
    }
    // [a, b] is isomorphic to the product over blocks B of b of Pi_{#a-blocks in B}
    let sizes: Vec<usize> = b
        .blocks()
        .iter()
        .map(|blk| blk.iter().filter(|&&x| a.block_of(x) == x).count())
        .collect();
    Ok(mobius_of_type(&sizes))
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let labels: Vec<String> = b.iter().map(|x| (x + 1).to_string()).collect();
                format!("{{{}}}", labels.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition{self}")
    }
}
