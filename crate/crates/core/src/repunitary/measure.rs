use std::collections::HashMap;

use num::bigint::BigInt;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use super::ShiftedWeight;
use crate::error::{Error, Result};
use crate::freeprob::MomentSequence;
use crate::scalar::{int, Rational};

/// Finitely supported measure with exact rational locations and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    /// `(location, weight)`, sorted by location, distinct locations, nonzero weights.
    atoms: Vec<(Rational, Rational)>,
}

impl AtomicMeasure {
    /// Merges repeated locations and drops zero weights.
    pub fn new(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        let mut sorted: Vec<(Rational, Rational)> = atoms.into_iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (x, w) in sorted {
            match merged.last_mut() {
                Some((y, v)) if *y == x => *v += w,
                _ => merged.push((x, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        AtomicMeasure { atoms: merged }
    }

    pub fn dirac(x: Rational) -> Self {
        AtomicMeasure::new([(x, Rational::one())])
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn moment(&self, k: usize) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, (x, w)| acc + w * num::pow(x.clone(), k))
    }

    /// `m_1..m_k`.
    pub fn moments(&self, k: usize) -> MomentSequence<Rational> {
        MomentSequence((1..=k).map(|p| self.moment(p)).collect())
    }

    pub fn translate(&self, s: &Rational) -> Self {
        AtomicMeasure::new(self.atoms.iter().map(|(x, w)| (x + s, w.clone())))
    }

    /// The dilation `D_eps`.
    pub fn dilate(&self, eps: &Rational) -> Self {
        AtomicMeasure::new(self.atoms.iter().map(|(x, w)| (x * eps, w.clone())))
    }
}

/// `(1/n) sum_i delta_{l_i}`.
pub fn naive_spectral(l: &ShiftedWeight) -> AtomicMeasure {
    let w = Rational::new(BigInt::one(), BigInt::from(l.n()));
    AtomicMeasure::new(l.entries().iter().map(|&x| (int(x), w.clone())))
}

/// `gamma_i = (1/n) prod_{j != i} (1 - 1/(l_i - l_j))`.
pub fn zelobenko_weights(l: &ShiftedWeight) -> Vec<Rational> {
    let e = l.entries();
    let n = e.len() as i64;
    (0..e.len())
        .map(|i| {
            e.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Rational::new(BigInt::one(), BigInt::from(n)), |acc, (_, &lj)| {
                    let d = e[i] - lj;
                    acc * Rational::new(BigInt::from(d - 1), BigInt::from(d))
                })
        })
        .collect()
}

/// `sum_i gamma_i delta_{l_i}`.
pub fn natural_spectral(l: &ShiftedWeight) -> AtomicMeasure {
    AtomicMeasure::new(
        l.entries()
            .iter()
            .zip(zelobenko_weights(l))
            .map(|(&x, g)| (int(x), g)),
    )
}

/// `(1/n) sum_{i,j} [(L + J)^k]_{ij}` with `L = diag(l)` and `J` strictly
/// upper triangular with all entries `-1`.
pub fn natural_moment_via_matrix(l: &ShiftedWeight, k: usize) -> Rational {
    let e = l.entries();
    let mut v: Vec<BigInt> = vec![BigInt::one(); e.len()];
    for _ in 0..k {
        // (L + J) v, using suffix sums for J
        let mut suffix = BigInt::zero();
        let mut next = vec![BigInt::zero(); e.len()];
        for i in (0..e.len()).rev() {
            next[i] = &v[i] * e[i] - &suffix;
            suffix += &v[i];
        }
        v = next;
    }
    Rational::new(v.iter().sum(), BigInt::from(e.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    NaiveToNatural,
    NaturalToNaive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralKind {
    Naive,
    Natural,
}

/// Sum of `prod_t x_{i_t}^{alpha_t}` over tuples of distinct indices, in
/// power sums: peel off the last exponent and correct for collisions.
struct DistinctSums<'a> {
    p: &'a [Rational],
    memo: HashMap<Vec<usize>, Rational>,
}

impl DistinctSums<'_> {
    fn get(&mut self, alpha: &[usize]) -> Rational {
        let mut key = alpha.to_vec();
        key.sort_unstable();
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let value = match key.split_last() {
            None => Rational::one(),
            Some((&last, rest)) => {
                let mut acc = &self.p[last] * self.get(rest);
                for j in 0..rest.len() {
                    let mut merged = rest.to_vec();
                    merged[j] += last;
                    acc -= self.get(&merged);
                }
                acc
            }
        };
        self.memo.insert(key, value.clone());
        value
    }
}

/// Partitions of `total` into exactly `parts` nonnegative parts, weakly decreasing.
fn padded_partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in (0..=max.min(total)).rev() {
            if x * parts < total {
                break;
            }
            cur.push(x);
            rec(total - x, parts - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `n m_k(mu_l)` from the power sums `p_0 = n, p_1, .., p_k` of `l`:
/// `sum over alpha_1 >= .. >= alpha_q >= 0 with |alpha| + q - 1 = k` of
/// `(-1)^(q-1) m_alpha(l)`.
fn natural_times_n(sums: &mut DistinctSums<'_>, k: usize) -> Rational {
    let mut acc = Rational::zero();
    for q in 1..=k + 1 {
        for alpha in padded_partitions(k + 1 - q, q) {
            let mut mult = BigInt::one();
            let mut run = 1;
            for w in alpha.windows(2) {
                if w[0] == w[1] {
                    run += 1;
                } else {
                    mult *= factorial(run);
                    run = 1;
                }
            }
            mult *= factorial(run);
            let m = sums.get(&alpha) / Rational::from_integer(mult);
            if q % 2 == 1 {
                acc += m;
            } else {
                acc -= m;
            }
        }
    }
    acc
}

/// Converts between naive moments `m_k(hat mu_l)` and natural moments
/// `m_k(mu_l)` for weights of `U(n)`, orders `1..=input.len()`.
pub fn convert_moments(direction: Direction, n: usize, input: &[Rational]) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let nr = int(n as i64);
    let big_k = input.len();
    match direction {
        Direction::NaiveToNatural => {
            let p: Vec<Rational> = std::iter::once(nr.clone())
                .chain(input.iter().map(|m| m * &nr))
                .collect();
            let mut sums = DistinctSums { p: &p, memo: HashMap::new() };
            Ok((1..=big_k).map(|k| natural_times_n(&mut sums, k) / &nr).collect())
        }
        Direction::NaturalToNaive => {
            // n m_k = p_k + (terms in p_0..p_{k-1}); solve for p_k in order
            let mut p = vec![nr.clone()];
            for k in 1..=big_k {
                p.push(Rational::zero());
                let rest = {
                    let mut sums = DistinctSums { p: &p, memo: HashMap::new() };
                    natural_times_n(&mut sums, k)
                };
                p[k] = &input[k - 1] * &nr - rest;
            }
            Ok(p[1..].iter().map(|x| x / &nr).collect())
        }
    }
}

/// `m_k` of the naive or natural spectral measure of `l`, for `k = 1..=order`.
pub fn spectral_moments(l: &ShiftedWeight, order: usize, kind: SpectralKind) -> Vec<Rational> {
    let n = int(l.n() as i64);
    let naive: Vec<Rational> = (1..=order)
        .map(|k| Rational::from_integer(l.power_sum(k)) / &n)
        .collect();
    match kind {
        SpectralKind::Naive => naive,
        SpectralKind::Natural => {
            convert_moments(Direction::NaiveToNatural, l.n(), &naive).expect("n >= 1")
        }
    }
}
