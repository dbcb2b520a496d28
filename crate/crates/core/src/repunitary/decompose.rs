use std::collections::HashMap;

use num::bigint::{BigInt, Sign};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::weight::{shift, weyl_dimension, ShiftedWeight};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Largest `n` accepted by the Littlewood-Richardson enumeration.
pub const MAX_LR_N: usize = 8;
/// Largest size of the smaller factor accepted by the Littlewood-Richardson enumeration.
pub const MAX_LR_SIZE: i64 = 40;
/// Largest number of components handled by exact enumeration.
pub const MAX_COMPONENTS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: ShiftedWeight,
    pub mult: u64,
    pub dim: BigInt,
}

/// A representation of `U(n)` as irreducible components with multiplicities.
/// Components are kept in decreasing lexicographic order of their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDecomposition {
    n: usize,
    components: Vec<Component>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    l: Vec<i64>,
    mult: u64,
    dim: String,
}

#[derive(Serialize, Deserialize)]
struct DecompositionJson {
    n: usize,
    components: Vec<ComponentJson>,
}

impl WeightedDecomposition {
    /// Builds a decomposition from `(shifted weight, multiplicity)` pairs;
    /// repeated weights are merged.
    pub fn new(n: usize, parts: impl IntoIterator<Item = (ShiftedWeight, u64)>) -> Result<Self> {
        let mut merged: HashMap<ShiftedWeight, u64> = HashMap::new();
        for (w, m) in parts {
            if w.n() != n {
                return Err(Error::invalid(format!("{w} is not a weight of U({n})")));
            }
            let slot = merged.entry(w).or_default();
            *slot = slot
                .checked_add(m)
                .ok_or_else(|| Error::guard("multiplicity exceeds 64 bits"))?;
        }
        let mut components: Vec<Component> = merged
            .into_iter()
            .filter(|&(_, m)| m > 0)
            .map(|(weight, mult)| Component {
                dim: weight.dimension(),
                weight,
                mult,
            })
            .collect();
        components.sort_by(|a, b| b.weight.cmp(&a.weight));
        Ok(WeightedDecomposition { n, components })
    }

    pub fn irreducible(weight: ShiftedWeight) -> Self {
        let n = weight.n();
        WeightedDecomposition::new(n, [(weight, 1)]).expect("single weight")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `sum mult * dim`.
    pub fn total_dimension(&self) -> BigInt {
        self.components
            .iter()
            .map(|c| &c.dim * BigInt::from(c.mult))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = DecompositionJson {
            n: self.n,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    l: c.weight.entries().to_vec(),
                    mult: c.mult,
                    dim: c.dim.to_string(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses the JSON shape written by [`to_json`](Self::to_json); stored
    /// dimensions are checked against the Weyl formula.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DecompositionJson = serde_json::from_str(text)?;
        let mut parts = Vec::with_capacity(doc.components.len());
        for c in doc.components {
            let w = ShiftedWeight::new(c.l)?;
            if c.dim != w.dimension().to_string() {
                return Err(Error::invalid(format!("stored dimension of {w} is wrong")));
            }
            parts.push((w, c.mult));
        }
        WeightedDecomposition::new(doc.n, parts)
    }
}

fn check_highest(lambda: &[i64], n: usize) -> Result<()> {
    if lambda.len() != n || n == 0 {
        return Err(Error::invalid(format!(
            "highest weight {lambda:?} must have n = {n} entries"
        )));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid(format!("{lambda:?} is not weakly decreasing")));
    }
    Ok(())
}

/// Littlewood-Richardson decomposition of `V_lambda (x) V_mu` for `U(n)`.
///
/// Negative entries are handled by twisting both factors by a power of the
/// determinant; the smaller factor is used as the tableau content.
pub fn lr_tensor_decompose(lambda: &[i64], mu: &[i64], n: usize) -> Result<WeightedDecomposition> {
    check_highest(lambda, n)?;
    check_highest(mu, n)?;
    if n > MAX_LR_N {
        return Err(Error::guard(format!(
            "Littlewood-Richardson enumeration is limited to n <= {MAX_LR_N}; use the Pieri rule for one-row factors"
        )));
    }
    let (sl, sm) = (lambda[n - 1], mu[n - 1]);
    let mut a: Vec<i64> = lambda.iter().map(|x| x - sl).collect();
    let mut b: Vec<i64> = mu.iter().map(|x| x - sm).collect();
    if b.iter().sum::<i64>() > a.iter().sum::<i64>() {
        std::mem::swap(&mut a, &mut b);
    }
    let size: i64 = b.iter().sum();
    if size > MAX_LR_SIZE {
        return Err(Error::guard(format!(
            "Littlewood-Richardson enumeration is limited to |mu| <= {MAX_LR_SIZE} (got {size})"
        )));
    }
    let mut found: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut counts = vec![vec![0i64; n]; n];
    lr_letters(&a, &b, 0, &mut counts, &mut found);
    let twist = sl + sm;
    let d = WeightedDecomposition::new(
        n,
        found.into_iter().map(|(nu, c)| {
            let nu: Vec<i64> = nu.iter().map(|x| x + twist).collect();
            (ShiftedWeight::new_unchecked(shift(&nu)), c)
        }),
    )?;
    let expect = weyl_dimension(&shift(lambda)) * weyl_dimension(&shift(mu));
    if d.total_dimension() != expect {
        return Err(Error::Consistency(format!(
            "dimension identity fails for {lambda:?} x {mu:?}"
        )));
    }
    Ok(d)
}

/// Places letter `r` (0-based) as a horizontal strip of `mu[r]` cells on
/// `shape`, keeping the reverse reading word a lattice word.
fn lr_letters(
    shape: &[i64],
    mu: &[i64],
    r: usize,
    counts: &mut Vec<Vec<i64>>,
    found: &mut HashMap<Vec<i64>, u64>,
) {
    if r == mu.len() || mu[r] == 0 {
        *found.entry(shape.to_vec()).or_default() += 1;
        return;
    }
    let mut next = shape.to_vec();
    strip_rows(shape, mu, r, 0, mu[r], 0, 0, &mut next, counts, found);
}

#[allow(clippy::too_many_arguments)]
fn strip_rows(
    shape: &[i64],
    mu: &[i64],
    r: usize,
    row: usize,
    remaining: i64,
    placed_r: i64,
    prev_above: i64,
    next: &mut Vec<i64>,
    counts: &mut Vec<Vec<i64>>,
    found: &mut HashMap<Vec<i64>, u64>,
) {
    let n = shape.len();
    if remaining == 0 {
        lr_letters(&next.clone(), mu, r + 1, counts, found);
        return;
    }
    if row == n {
        return;
    }
    let cap_strip = if row == 0 { remaining } else { shape[row - 1] - shape[row] };
    // lattice: #r in rows 0..=row <= #(r-1) in rows 0..row
    let cap_lattice = if r == 0 { remaining } else { prev_above - placed_r };
    let cap = remaining.min(cap_strip).min(cap_lattice);
    let above_next = if r == 0 { 0 } else { prev_above + counts[r - 1][row] };
    for add in (0..=cap).rev() {
        next[row] = shape[row] + add;
        counts[r][row] = add;
        strip_rows(
            shape,
            mu,
            r,
            row + 1,
            remaining - add,
            placed_r + add,
            above_next,
            next,
            counts,
            found,
        );
    }
    counts[r][row] = 0;
    next[row] = shape[row];
}

/// Pieri rule: `V_lambda (x) Sym^k` as the sum over horizontal strips of size `k`.
pub fn pieri_decompose(lambda: &[i64], k: i64, n: usize) -> Result<WeightedDecomposition> {
    check_highest(lambda, n)?;
    if k < 0 {
        return Err(Error::invalid("row length must be nonnegative"));
    }
    let mut out: Vec<(ShiftedWeight, u64)> = Vec::new();
    let mut cur = lambda.to_vec();
    pieri_rows(lambda, 0, k, &mut cur, &mut out)?;
    WeightedDecomposition::new(n, out)
}

fn pieri_rows(
    lambda: &[i64],
    row: usize,
    remaining: i64,
    cur: &mut Vec<i64>,
    out: &mut Vec<(ShiftedWeight, u64)>,
) -> Result<()> {
    if row == lambda.len() {
        if remaining == 0 {
            if out.len() >= MAX_COMPONENTS {
                return Err(Error::guard(format!(
                    "more than {MAX_COMPONENTS} components"
                )));
            }
            out.push((ShiftedWeight::new_unchecked(shift(cur)), 1));
        }
        return Ok(());
    }
    let cap = if row == 0 {
        remaining
    } else {
        remaining.min(lambda[row - 1] - lambda[row])
    };
    // the rows below can absorb at most the remaining gaps
    let room: i64 = (row + 1..lambda.len()).map(|i| lambda[i - 1] - lambda[i]).sum();
    let low = (remaining - room).max(0);
    for add in low..=cap {
        cur[row] = lambda[row] + add;
        pieri_rows(lambda, row + 1, remaining - add, cur, out)?;
    }
    cur[row] = lambda[row];
    Ok(())
}

/// `P(l) = mult_l dim(l) / dim`, in component order.
pub fn component_distribution(d: &WeightedDecomposition) -> Result<Vec<(ShiftedWeight, Rational)>> {
    if d.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    let total = d.total_dimension();
    Ok(d.components
        .iter()
        .map(|c| {
            (
                c.weight.clone(),
                Rational::new(&c.dim * BigInt::from(c.mult), total.clone()),
            )
        })
        .collect())
}

/// Uniform integer in `0..bound` by rejection on random 32-bit digits.
fn uniform_below<R: Rng + ?Sized>(bound: &BigInt, rng: &mut R) -> BigInt {
    let bits = bound.bits();
    let digits = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (digits as u64 - 1);
    let mask = if top_bits == 32 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut words: Vec<u32> = (0..digits).map(|_| rng.random()).collect();
        if let Some(last) = words.last_mut() {
            *last &= mask;
        }
        let x = BigInt::from_slice(Sign::Plus, &words);
        if &x < bound {
            return x;
        }
    }
}

/// Exact inverse-CDF draw from `P(l)`, scanning components in order.
pub fn sample_component<R: Rng + ?Sized>(d: &WeightedDecomposition, rng: &mut R) -> Result<ShiftedWeight> {
    if d.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    let mut u = uniform_below(&d.total_dimension(), rng);
    for c in &d.components {
        let w = &c.dim * BigInt::from(c.mult);
        if u < w {
            return Ok(c.weight.clone());
        }
        u -= w;
    }
    unreachable!("u is below the total dimension")
}
