use std::ops::{Mul, Sub};

use num::Zero;

use super::table::{moments_to_cumulants, MomentTable};
use crate::combinat::SetPartition;
use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

/// Square matrix over the rationals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("matrix must be square and nonempty"));
        }
        Ok(RatMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        RatMatrix {
            dim,
            entries: (0..dim * dim).map(|x| f(x / dim, x % dim)).collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| int((i == j) as i64))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.dim + j]
    }

    /// `tr(A) / dim`.
    pub fn normalized_trace(&self) -> Rational {
        let sum = (0..self.dim).fold(Rational::zero(), |acc, i| acc + self.get(i, i));
        sum / int(self.dim as i64)
    }

    pub fn commutator(&self, other: &RatMatrix) -> RatMatrix {
        &(self * other) - &(other * self)
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        RatMatrix::from_fn(n, |i, j| {
            (0..n).fold(Rational::zero(), |acc, t| acc + self.get(i, t) * rhs.get(t, j))
        })
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        RatMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Moments of a sequence of matrices under the normalized trace; each block
/// multiplies its factors left to right.
pub fn matrix_moments(mats: &[RatMatrix]) -> Result<MomentTable<Rational>> {
    let dim = mats.first().map(RatMatrix::dim).unwrap_or(1);
    if mats.iter().any(|m| m.dim() != dim) {
        return Err(Error::invalid("matrices must share one dimension"));
    }
    MomentTable::from_block_fn(mats.len(), |block| {
        block
            .iter()
            .fold(RatMatrix::identity(dim), |acc, &i| &acc * &mats[i])
            .normalized_trace()
    })
}

fn tensor_cumulant(mats: &[RatMatrix], w: &SetPartition) -> Result<Rational> {
    moments_to_cumulants(&matrix_moments(mats)?).value(w)
}

/// Both sides of the commutator identity for tensor cumulants:
/// `k_W(.., a_i, a_{i+1}, ..) - k_W(.., a_{i+1}, a_i, ..)` and
/// `k_{W'}(.., [a_i, a_{i+1}], ..)`, where `W'` merges `i` and `i+1`.
///
/// `i` is 0-based and `W` must put `i` and `i+1` in one block.
pub fn commutator_cumulant_check(
    mats: &[RatMatrix],
    i: usize,
    w: &SetPartition,
) -> Result<(Rational, Rational)> {
    let n = mats.len();
    if w.size() != n {
        return Err(Error::GroundSetMismatch {
            left: n,
            right: w.size(),
        });
    }
    if i + 1 >= n || !w.same_block(i, i + 1) {
        return Err(Error::invalid(format!(
            "{w} does not connect positions {} and {}",
            i + 1,
            i + 2
        )));
    }
    let mut swapped = mats.to_vec();
    swapped.swap(i, i + 1);
    let lhs = tensor_cumulant(mats, w)? - tensor_cumulant(&swapped, w)?;

    let mut merged: Vec<RatMatrix> = mats[..i].to_vec();
    merged.push(mats[i].commutator(&mats[i + 1]));
    merged.extend_from_slice(&mats[i + 2..]);
    let labels: Vec<usize> = (0..n)
        .filter(|&j| j != i + 1)
        .map(|j| w.block_of(j))
        .collect();
    let w_merged = SetPartition::from_labels(&labels);
    let rhs = tensor_cumulant(&merged, &w_merged)?;
    Ok((lhs, rhs))
}
