use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::combinat::{mobius, SetPartition};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest order handled by the subset-indexed tables.
pub const MAX_ORDER: usize = 12;

/// Values indexed by nonempty subsets of `0..k` (bitmask), extended
/// multiplicatively to every set partition.
#[derive(Clone, Debug, PartialEq)]
struct BlockTable<T> {
    order: usize,
    // index = bitmask; entry 0 (the empty block) is unused
    blocks: Vec<T>,
}

impl<T: Scalar> BlockTable<T> {
    fn from_fn(order: usize, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::guard(format!("cumulant tables are limited to order {MAX_ORDER}")));
        }
        let mut blocks = Vec::with_capacity(1 << order);
        blocks.push(T::one());
        for mask in 1usize..(1 << order) {
            blocks.push(f(&mask_elements(mask)));
        }
        Ok(BlockTable { order, blocks })
    }

    fn value(&self, v: &SetPartition) -> Result<T> {
        if v.size() != self.order {
            return Err(Error::GroundSetMismatch {
                left: self.order,
                right: v.size(),
            });
        }
        Ok(v.blocks()
            .iter()
            .fold(T::one(), |acc, b| acc * self.blocks[elements_mask(b)].clone()))
    }
}

pub(crate) fn mask_elements(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

pub(crate) fn elements_mask(elements: &[usize]) -> usize {
    elements.iter().fold(0, |m, &i| m | 1 << i)
}

type MobiusList = Arc<Vec<(Vec<Vec<usize>>, i64)>>;

/// Blocks of every set partition `W` of `0..m` paired with `mu(W, 1_m)`, cached per `m`.
fn partitions_with_mobius(m: usize) -> MobiusList {
    static CACHE: OnceLock<Mutex<HashMap<usize, MobiusList>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(list) = cache.lock().unwrap().get(&m) {
        return list.clone();
    }
    let one = SetPartition::coarsest(m);
    let list: MobiusList = Arc::new(
        SetPartition::all(m)
            .into_iter()
            .map(|w| {
                let mu = mobius(&w, &one).expect("every partition is below 1_m");
                (w.blocks(), mu)
            })
            .collect(),
    );
    cache.lock().unwrap().insert(m, list.clone());
    list
}

/// Multiplicative family of moments `E_V` on the partitions of `0..k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T>(BlockTable<T>);

/// Multiplicative family of cumulants `k_V` with `sum_{W <= V} k_W = E_V`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable<T>(BlockTable<T>);

macro_rules! table_api {
    ($name:ident) => {
        impl<T: Scalar> $name<T> {
            /// Builds the table from its values on single blocks; the block is
            /// passed as a sorted element list.
            pub fn from_block_fn(order: usize, f: impl FnMut(&[usize]) -> T) -> Result<Self> {
                BlockTable::from_fn(order, f).map($name)
            }

            pub fn order(&self) -> usize {
                self.0.order
            }

            /// Value on the single block `elements`.
            pub fn block(&self, elements: &[usize]) -> T {
                self.0.blocks[elements_mask(elements)].clone()
            }

            /// Value at `V`: the product over blocks.
            pub fn value(&self, v: &SetPartition) -> Result<T> {
                self.0.value(v)
            }

            /// Value at `1_k`.
            pub fn top(&self) -> T {
                self.0.blocks[(1 << self.0.order) - 1].clone()
            }

            /// Builds the table from a family of values `E(S, W)` given for
            /// every nonempty subset `S` and every partition `W` of `S`
            /// (relabeled to `0..|S|`), rejecting families that are not
            /// multiplicative over blocks.
            pub fn from_family(
                order: usize,
                mut family: impl FnMut(&[usize], &SetPartition) -> T,
            ) -> Result<Self> {
                let table =
                    BlockTable::from_fn(order, |s| family(s, &SetPartition::coarsest(s.len())))?;
                for mask in 1usize..(1 << order) {
                    let subset = mask_elements(mask);
                    for w in SetPartition::all(subset.len()) {
                        let expect = w.blocks().iter().fold(T::one(), |acc, b| {
                            let elems: Vec<usize> = b.iter().map(|&i| subset[i]).collect();
                            acc * table.blocks[elements_mask(&elems)].clone()
                        });
                        if family(&subset, &w) != expect {
                            return Err(Error::NonMultiplicative);
                        }
                    }
                }
                Ok($name(table))
            }
        }
    };
}

table_api!(MomentTable);
table_api!(CumulantTable);

/// Cumulants from moments by Mobius inversion on every block:
/// `k(S) = sum_{W in Pi(S)} mu(W, 1_S) prod_{B in W} E(B)`.
pub fn moments_to_cumulants<T: Scalar>(m: &MomentTable<T>) -> CumulantTable<T> {
    let order = m.order();
    let blocks = (0..1usize << order)
        .map(|mask| {
            if mask == 0 {
                return T::one();
            }
            let subset = mask_elements(mask);
            partitions_with_mobius(subset.len())
                .iter()
                .fold(T::zero(), |acc, (w, mu)| {
                    let term = w.iter().fold(T::from_i64(*mu), |p, b| {
                        let mask = b.iter().fold(0, |mk, &i| mk | 1 << subset[i]);
                        p * m.0.blocks[mask].clone()
                    });
                    acc + term
                })
        })
        .collect();
    CumulantTable(BlockTable { order, blocks })
}

/// Moments from cumulants: `E(S) = sum_{W in Pi(S)} prod_{B in W} k(B)`.
pub fn cumulants_to_moments<T: Scalar>(c: &CumulantTable<T>) -> MomentTable<T> {
    let order = c.order();
    let blocks = (0..1usize << order)
        .map(|mask| {
            if mask == 0 {
                return T::one();
            }
            let subset = mask_elements(mask);
            partitions_with_mobius(subset.len())
                .iter()
                .fold(T::zero(), |acc, (w, _)| {
                    let term = w.iter().fold(T::one(), |p, b| {
                        let mask = b.iter().fold(0, |mk, &i| mk | 1 << subset[i]);
                        p * c.0.blocks[mask].clone()
                    });
                    acc + term
                })
        })
        .collect();
    MomentTable(BlockTable { order, blocks })
}

/// Cumulant of grouped products: with `grouping` an interval partition,
/// `k(prod_{B_1}, .., prod_{B_l}) = sum_{W : W v grouping = 1} k_W`.
pub fn product_formula<T: Scalar>(c: &CumulantTable<T>, grouping: &SetPartition) -> Result<T> {
    if grouping.size() != c.order() {
        return Err(Error::GroundSetMismatch {
            left: c.order(),
            right: grouping.size(),
        });
    }
    if !grouping.is_interval() {
        return Err(Error::invalid(format!("{grouping} is not an interval partition")));
    }
    let top = SetPartition::coarsest(c.order());
    let mut acc = T::zero();
    for w in SetPartition::all(c.order()) {
        if w.join(grouping)? == top {
            acc = acc + c.value(&w)?;
        }
    }
    Ok(acc)
}
