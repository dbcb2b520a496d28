use std::fmt;

use num::bigint::BigInt;
use num::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shifted highest weight `l_i = lambda_i + (n - i)` of an irreducible
/// representation of `U(n)`; strictly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ShiftedWeight {
    l: Vec<i64>,
}

impl ShiftedWeight {
    pub fn new(l: Vec<i64>) -> Result<Self> {
        if l.is_empty() {
            return Err(Error::invalid("a shifted weight needs n >= 1 entries"));
        }
        if l.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid(format!("{l:?} is not strictly decreasing")));
        }
        Ok(ShiftedWeight { l })
    }

    pub(crate) fn new_unchecked(l: Vec<i64>) -> Self {
        ShiftedWeight { l }
    }

    /// Shifts a weakly decreasing highest weight of length `n`.
    pub fn from_highest(lambda: &[i64]) -> Result<Self> {
        if lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("{lambda:?} is not weakly decreasing")));
        }
        ShiftedWeight::new(shift(lambda))
    }

    /// The highest weight `lambda_i = l_i - (n - i)`.
    pub fn highest(&self) -> Vec<i64> {
        let n = self.n() as i64;
        self.l
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (n - 1 - i as i64))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.l.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.l
    }

    /// `l + s`, the weight of the representation twisted by `det^s`.
    pub fn translate(&self, s: i64) -> Self {
        ShiftedWeight {
            l: self.l.iter().map(|x| x + s).collect(),
        }
    }

    /// Weyl dimension `prod_{i<j} (l_i - l_j) / (j - i)`.
    pub fn dimension(&self) -> BigInt {
        weyl_dimension(&self.l)
    }

    /// Power sum `p_k(l) = sum_i l_i^k`, with `p_0 = n`.
    pub fn power_sum(&self, k: usize) -> BigInt {
        self.l
            .iter()
            .map(|&x| num::pow(BigInt::from(x), k))
            .sum()
    }
}

pub(crate) fn shift(lambda: &[i64]) -> Vec<i64> {
    let n = lambda.len() as i64;
    lambda
        .iter()
        .enumerate()
        .map(|(i, &x)| x + (n - 1 - i as i64))
        .collect()
}

pub(crate) fn weyl_dimension(l: &[i64]) -> BigInt {
    let n = l.len();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= l[i] - l[j];
            den *= (j - i) as i64;
        }
    }
    num / den
}

impl TryFrom<Vec<i64>> for ShiftedWeight {
    type Error = Error;

    fn try_from(l: Vec<i64>) -> Result<Self> {
        ShiftedWeight::new(l)
    }
}

impl From<ShiftedWeight> for Vec<i64> {
    fn from(w: ShiftedWeight) -> Vec<i64> {
        w.l
    }
}

impl fmt::Display for ShiftedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.l.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
