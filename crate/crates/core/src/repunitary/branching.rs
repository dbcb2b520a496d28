use std::collections::HashMap;

use num::bigint::BigInt;
use num::{Integer, One, Zero};

use super::decompose::{WeightedDecomposition, MAX_COMPONENTS};
use super::weight::{shift, ShiftedWeight};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::Rational;

/// Highest weights of `U(n-1)` interlacing `lambda`: `lambda_i >= mu_i >= lambda_{i+1}`.
fn interlacing(lambda: &[i64], mut visit: impl FnMut(&[i64])) {
    fn rec(lambda: &[i64], cur: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
        let i = cur.len();
        if i + 1 == lambda.len() {
            visit(cur);
            return;
        }
        for x in (lambda[i + 1]..=lambda[i]).rev() {
            cur.push(x);
            rec(lambda, cur, visit);
            cur.pop();
        }
    }
    rec(lambda, &mut Vec::with_capacity(lambda.len()), &mut visit);
}

/// Restriction from `U(n)` to `U(n-1)`: interlacing weights with
/// probabilities `dim(l') / dim(l)`.
pub fn branch_one_step(l: &ShiftedWeight) -> Result<Vec<(ShiftedWeight, Rational)>> {
    if l.n() < 2 {
        return Err(Error::invalid("branching needs n >= 2"));
    }
    let dim = l.dimension();
    let mut out = Vec::new();
    interlacing(&l.highest(), |mu| {
        let w = ShiftedWeight::new_unchecked(shift(mu));
        let p = Rational::new(w.dimension(), dim.clone());
        out.push((w, p));
    });
    Ok(out)
}

/// Restriction from `U(n)` to `U(m)`; multiplicities count Gelfand-Tsetlin
/// paths from `l` down to each weight of `U(m)`.
///
/// The path count from `lambda` to `mu` is the skew Schur value
/// `s_{lambda/mu}(1^{n-m})`, so only the weights of `U(m)` are enumerated.
pub fn branch_chain(l: &ShiftedWeight, m: usize) -> Result<WeightedDecomposition> {
    let n = l.n();
    if m == 0 || m > n {
        return Err(Error::invalid(format!("target rank {m} must lie in 1..={n}")));
    }
    let d = if n - m <= 1 {
        branch_chain_iterated(l, m)?
    } else {
        branch_chain_direct(l, m)?
    };
    if d.total_dimension() != l.dimension() {
        return Err(Error::Consistency(format!("restriction of {l} loses dimension")));
    }
    Ok(d)
}

/// `branch_chain` by repeated one-step interlacing.
pub(crate) fn branch_chain_iterated(l: &ShiftedWeight, m: usize) -> Result<WeightedDecomposition> {
    let n = l.n();
    let mut current: HashMap<Vec<i64>, u64> = HashMap::from([(l.highest(), 1)]);
    for _ in m..n {
        let mut next: HashMap<Vec<i64>, u64> = HashMap::new();
        let mut overflow = false;
        for (lambda, count) in &current {
            interlacing(lambda, |mu| {
                let slot = next.entry(mu.to_vec()).or_default();
                match slot.checked_add(*count) {
                    Some(v) => *slot = v,
                    None => overflow = true,
                }
            });
            if next.len() > MAX_COMPONENTS {
                return Err(Error::guard(format!("more than {MAX_COMPONENTS} components")));
            }
        }
        if overflow {
            return Err(Error::guard("branching multiplicity exceeds 64 bits"));
        }
        current = next;
    }
    WeightedDecomposition::new(
        m,
        current
            .into_iter()
            .map(|(mu, c)| (ShiftedWeight::new_unchecked(shift(&mu)), c)),
    )
}

fn branch_chain_direct(l: &ShiftedWeight, m: usize) -> Result<WeightedDecomposition> {
    let n = l.n();
    let q = n - m;
    let top = l.highest();
    let floor = top[n - 1];
    let lambda: Vec<i64> = top.iter().map(|x| x - floor).collect();
    let count = (0..m).try_fold(1u128, |acc, i| acc.checked_mul((lambda[i] - lambda[i + q] + 1) as u128));
    if count.is_none_or(|c| c > MAX_COMPONENTS as u128) {
        return Err(Error::guard(format!("more than {MAX_COMPONENTS} components")));
    }
    let counter = SkewCounter::new(&lambda, m);
    // weights of U(m) with lambda_{i+q} <= mu_i <= lambda_i, split on mu_0
    let firsts: Vec<i64> = (lambda[q]..=lambda[0]).rev().collect();
    let parts = Exec::default().map_slice(&firsts, |&first| -> Result<Vec<(ShiftedWeight, u64)>> {
        let mut out = Vec::new();
        let mut mu = vec![first];
        let mut failure = None;
        fill_between(&lambda, q, m, &mut mu, &mut |mu| {
            if failure.is_some() {
                return;
            }
            let paths = counter.paths(mu);
            match u64::try_from(&paths) {
                Ok(0) => {}
                Ok(c) => {
                    let highest: Vec<i64> = mu.iter().map(|x| x + floor).collect();
                    out.push((ShiftedWeight::new_unchecked(shift(&highest)), c));
                }
                Err(_) => failure = Some(Error::guard("branching multiplicity exceeds 64 bits")),
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    });
    let mut all = Vec::new();
    for part in parts {
        all.extend(part?);
    }
    WeightedDecomposition::new(m, all)
}

fn fill_between(lambda: &[i64], q: usize, m: usize, mu: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    let i = mu.len();
    if i == m {
        visit(mu);
        return;
    }
    let hi = lambda[i].min(mu[i - 1]);
    for x in (lambda[i + q]..=hi).rev() {
        mu.push(x);
        fill_between(lambda, q, m, mu, visit);
        mu.pop();
    }
}

/// Evaluates `s_{lambda/mu}(1^q)` through the Jacobi-Trudi matrix
/// `[h_{lambda_i - mu_j - i + j}]`. The last `q` columns do not depend on
/// `mu`; projecting onto the left kernel of that block leaves an `m x m`
/// determinant whose column `j` depends on `mu_j` alone.
struct SkewCounter {
    lo: Vec<i64>,
    // columns[j][mu_j - lo[j]] is column j of the projected matrix
    columns: Vec<Vec<Vec<BigInt>>>,
    // projected determinant = scale * full determinant
    scale: Rational,
}

impl SkewCounter {
    fn new(lambda: &[i64], m: usize) -> Self {
        let n = lambda.len();
        let q = n - m;
        let h = |r: i64| -> BigInt {
            if r < 0 {
                BigInt::zero()
            } else {
                binomial(r as u64 + q as u64 - 1, q as u64 - 1)
            }
        };
        let entry = |i: usize, mu_j: i64, j: usize| h(lambda[i] - mu_j - i as i64 + j as i64);
        let fixed: Vec<Vec<BigInt>> = (0..n).map(|i| (m..n).map(|j| entry(i, 0, j)).collect()).collect();
        let kernel = left_kernel(&fixed);
        assert_eq!(kernel.len(), m, "the constant Jacobi-Trudi block has full rank");
        let lo: Vec<i64> = (0..m).map(|j| lambda[j + q]).collect();
        let columns: Vec<Vec<Vec<BigInt>>> = (0..m)
            .map(|j| {
                (lo[j]..=lambda[j])
                    .map(|v| {
                        let col: Vec<BigInt> = (0..n).map(|i| entry(i, v, j)).collect();
                        kernel
                            .iter()
                            .map(|row| row.iter().zip(&col).map(|(a, b)| a * b).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut counter = SkewCounter {
            lo,
            columns,
            scale: Rational::one(),
        };
        // calibrate on mu = (lambda_0, .., lambda_{m-1}), which has at least one path
        let mu0 = &lambda[..m];
        let full: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| entry(i, if j < m { mu0[j] } else { 0 }, j)).collect())
            .collect();
        let reference = bareiss_det(full);
        counter.scale = Rational::new(counter.projected(mu0), reference);
        counter
    }

    fn projected(&self, mu: &[i64]) -> BigInt {
        let m = mu.len();
        let mat: Vec<Vec<BigInt>> = (0..m)
            .map(|r| (0..m).map(|j| self.columns[j][(mu[j] - self.lo[j]) as usize][r].clone()).collect())
            .collect();
        bareiss_det(mat)
    }

    fn paths(&self, mu: &[i64]) -> BigInt {
        let v = Rational::from_integer(self.projected(mu)) / &self.scale;
        debug_assert!(v.is_integer());
        v.to_integer()
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// Integer basis of `{x : x^T b = 0}` for an `n x q` matrix `b`.
fn left_kernel(b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.len();
    let q = b.first().map_or(0, Vec::len);
    // reduced row echelon form of b^T
    let mut t: Vec<Vec<Rational>> = (0..q)
        .map(|c| (0..n).map(|i| Rational::from_integer(b[i][c].clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..q).find(|&r| !t[r][col].is_zero()) else {
            continue;
        };
        t.swap(row, p);
        let inv = t[row][col].recip();
        for x in t[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..q {
            if r != row && !t[r][col].is_zero() {
                let f = t[r][col].clone();
                for c in 0..n {
                    let v = &t[row][c] * &f;
                    t[r][c] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == q {
            break;
        }
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); n];
            x[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -t[r][free].clone();
            }
            let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            x.iter().map(|v| (v * Rational::from_integer(den.clone())).to_integer()).collect()
        })
        .collect()
}
