//! First-order free probability in moment coordinates: non-crossing
//! partitions, free cumulants, free additive convolution and compression.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::SetPartition;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Largest order for which non-crossing partitions are enumerated.
pub const MAX_NC_ORDER: usize = 12;

/// Moments `m_1..m_K`; `m_0 = 1` is implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence<T>(pub Vec<T>);

/// Free cumulants `kappa_1..kappa_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeCumulantSequence<T>(pub Vec<T>);

impl<T: Scalar> MomentSequence<T> {
    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// `m_k` with `m_0 = 1`.
    pub fn get(&self, k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            self.0[k - 1].clone()
        }
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::invalid(format!(
                "sequence has order {}, {order} requested",
                self.order()
            )));
        }
        Ok(MomentSequence(self.0[..order].to_vec()))
    }
}

impl<T: Scalar> FreeCumulantSequence<T> {
    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, k: usize) -> T {
        self.0[k - 1].clone()
    }
}

type BlockSizes = Arc<Vec<Vec<usize>>>;

/// Block-size lists of the non-crossing partitions of `0..k`, memoized per `k`.
fn nc_block_sizes(k: usize) -> BlockSizes {
    static CACHE: OnceLock<Mutex<HashMap<usize, BlockSizes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&k) {
        return hit.clone();
    }
    let sizes: BlockSizes = Arc::new(
        non_crossing_partitions(k)
            .iter()
            .map(|p| p.blocks().iter().map(Vec::len).collect())
            .collect(),
    );
    cache.lock().unwrap().insert(k, sizes.clone());
    sizes
}

/// True when no two blocks cross: there is no `a < b < c < d` with `a, c`
/// in one block and `b, d` in another.
pub fn is_non_crossing(p: &SetPartition) -> bool {
    let k = p.size();
    // a partition is non-crossing iff the blocks nest like brackets
    let mut stack: Vec<usize> = Vec::new();
    // block labels are their minimal elements
    let mut last = vec![0; k];
    for x in 0..k {
        last[p.block_of(x)] = x;
    }
    for x in 0..k {
        let b = p.block_of(x);
        let first = b == x;
        if !first && stack.last() != Some(&b) {
            return false;
        }
        if first && last[b] != x {
            stack.push(b);
        } else if !first && last[b] == x {
            stack.pop();
        }
    }
    true
}

/// All non-crossing partitions of `0..k`, in the order of [`SetPartition::all`].
pub fn non_crossing_partitions(k: usize) -> Vec<SetPartition> {
    assert!(k <= MAX_NC_ORDER, "non-crossing enumeration is limited to k <= {MAX_NC_ORDER}");
    SetPartition::all(k).into_iter().filter(is_non_crossing).collect()
}

/// `m_n = sum over non-crossing partitions of prod kappa_{|B|}`.
pub fn free_cumulants_to_moments<T: Scalar>(c: &FreeCumulantSequence<T>) -> Result<MomentSequence<T>> {
    check_order(c.order())?;
    Ok(MomentSequence(
        (1..=c.order())
            .map(|n| {
                nc_block_sizes(n).iter().fold(T::zero(), |acc, sizes| {
                    acc + sizes.iter().fold(T::one(), |p, &s| p * c.get(s))
                })
            })
            .collect(),
    ))
}

/// Inverse of [`free_cumulants_to_moments`]: `kappa_n` is `m_n` minus the
/// contribution of non-crossing partitions with more than one block.
pub fn moments_to_free_cumulants<T: Scalar>(m: &MomentSequence<T>) -> Result<FreeCumulantSequence<T>> {
    check_order(m.order())?;
    let mut kappa: Vec<T> = Vec::with_capacity(m.order());
    for n in 1..=m.order() {
        let rest = nc_block_sizes(n)
            .iter()
            .filter(|sizes| sizes.len() > 1)
            .fold(T::zero(), |acc, sizes| {
                acc + sizes.iter().fold(T::one(), |p, &s| p * kappa[s - 1].clone())
            });
        kappa.push(m.get(n) - rest);
    }
    Ok(FreeCumulantSequence(kappa))
}

fn check_order(k: usize) -> Result<()> {
    if k > MAX_NC_ORDER {
        return Err(Error::guard(format!(
            "free cumulant transforms are limited to order {MAX_NC_ORDER}"
        )));
    }
    Ok(())
}

/// Moments of `a ⊞ b` up to order `k`: free cumulants add.
pub fn free_convolve<T: Scalar>(
    a: &MomentSequence<T>,
    b: &MomentSequence<T>,
    k: usize,
) -> Result<MomentSequence<T>> {
    let ka = moments_to_free_cumulants(&a.truncate(k)?)?;
    let kb = moments_to_free_cumulants(&b.truncate(k)?)?;
    let sum = ka.0.into_iter().zip(kb.0).map(|(x, y)| x + y).collect();
    free_cumulants_to_moments(&FreeCumulantSequence(sum))
}

/// Moments of the compression by a free projection of trace `alpha`,
/// normalized in the compressed space: `kappa_n -> alpha^(n-1) kappa_n`.
pub fn free_compress(m: &MomentSequence<Rational>, alpha: &Rational, k: usize) -> Result<MomentSequence<Rational>> {
    if !alpha.is_positive() || alpha > &Rational::one() {
        return Err(Error::invalid(format!("compression ratio {alpha} is not in (0, 1]")));
    }
    let kappa = moments_to_free_cumulants(&m.truncate(k)?)?;
    let mut scale = Rational::one();
    let scaled = kappa
        .0
        .into_iter()
        .map(|c| {
            let out = c * &scale;
            scale *= alpha;
            out
        })
        .collect();
    free_cumulants_to_moments(&FreeCumulantSequence(scaled))
}

/// Floating-point variant of [`free_compress`].
pub fn free_compress_f64(m: &MomentSequence<f64>, alpha: f64, k: usize) -> Result<MomentSequence<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("compression ratio {alpha} is not in (0, 1]")));
    }
    let kappa = moments_to_free_cumulants(&m.truncate(k)?)?;
    let scaled = kappa
        .0
        .iter()
        .enumerate()
        .map(|(i, c)| c * alpha.powi(i as i32))
        .collect();
    free_cumulants_to_moments(&FreeCumulantSequence(scaled))
}

/// Moments of a finitely supported measure.
pub fn atomic_moments(atoms: &[(Rational, Rational)], k: usize) -> MomentSequence<Rational> {
    MomentSequence(
        (1..=k)
            .map(|p| {
                atoms
                    .iter()
                    .fold(Rational::zero(), |acc, (x, w)| acc + w * num::pow(x.clone(), p))
            })
            .collect(),
    )
}
