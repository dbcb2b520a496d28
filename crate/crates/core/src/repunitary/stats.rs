use num::bigint::BigInt;
use num::Zero;

use super::decompose::{WeightedDecomposition, MAX_COMPONENTS};
use super::measure::{spectral_moments, SpectralKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{int, rat_pow, Rational};

/// Exact mean, covariance and third joint cumulants of spectral moments
/// `(m_{k_1}, .., m_{k_r})` of `mu_{eps l}` under `P(l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardStats {
    pub orders: Vec<usize>,
    pub mean: Vec<Rational>,
    pub covariance: Vec<Vec<Rational>>,
    /// `third[a][b][c] = k(m_a, m_b, m_c)`.
    pub third: Vec<Vec<Vec<Rational>>>,
}

impl PushforwardStats {
    pub fn variance(&self, a: usize) -> &Rational {
        &self.covariance[a][a]
    }

    pub fn third_cumulant(&self, a: usize) -> &Rational {
        &self.third[a][a][a]
    }
}

/// Weighted power sums over a slice of components: `S0 = sum w`,
/// `S1[a] = sum w x_a`, `S2[a][b]`, `S3[a][b][c]` with `x_a = n m_{k_a}(l)`.
#[derive(Clone)]
struct Sums {
    s0: BigInt,
    s1: Vec<BigInt>,
    s2: Vec<BigInt>,
    s3: Vec<BigInt>,
}

impl Sums {
    fn zero(r: usize) -> Self {
        Sums {
            s0: BigInt::zero(),
            s1: vec![BigInt::zero(); r],
            s2: vec![BigInt::zero(); r * r],
            s3: vec![BigInt::zero(); r * r * r],
        }
    }

    fn add(&mut self, other: &Sums) {
        self.s0 += &other.s0;
        for (a, b) in self.s1.iter_mut().zip(&other.s1) {
            *a += b;
        }
        for (a, b) in self.s2.iter_mut().zip(&other.s2) {
            *a += b;
        }
        for (a, b) in self.s3.iter_mut().zip(&other.s3) {
            *a += b;
        }
    }
}

const CHUNK: usize = 4096;

pub fn exact_pushforward_stats(
    d: &WeightedDecomposition,
    eps: &Rational,
    orders: &[usize],
    kind: SpectralKind,
) -> Result<PushforwardStats> {
    exact_pushforward_stats_with(d, eps, orders, kind, Exec::default())
}

pub fn exact_pushforward_stats_with(
    d: &WeightedDecomposition,
    eps: &Rational,
    orders: &[usize],
    kind: SpectralKind,
    exec: Exec,
) -> Result<PushforwardStats> {
    if d.is_empty() {
        return Err(Error::invalid("empty decomposition"));
    }
    if d.len() > MAX_COMPONENTS {
        return Err(Error::guard(format!("more than {MAX_COMPONENTS} components")));
    }
    if orders.is_empty() {
        return Err(Error::invalid("no moment orders requested"));
    }
    let r = orders.len();
    let top = *orders.iter().max().unwrap();
    let n = int(d.n() as i64);
    let comps = d.components();
    let chunks = exec.map_indexed(comps.len().div_ceil(CHUNK), |c| {
        let mut sums = Sums::zero(r);
        for comp in &comps[c * CHUNK..((c + 1) * CHUNK).min(comps.len())] {
            let w = &comp.dim * BigInt::from(comp.mult);
            let all = spectral_moments(&comp.weight, top, kind);
            let x: Vec<BigInt> = orders
                .iter()
                .map(|&k| {
                    if k == 0 {
                        return BigInt::from(d.n());
                    }
                    let v = &all[k - 1] * &n;
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect();
            sums.s0 += &w;
            for a in 0..r {
                let wa = &w * &x[a];
                for b in 0..r {
                    let wab = &wa * &x[b];
                    for c in 0..r {
                        sums.s3[(a * r + b) * r + c] += &wab * &x[c];
                    }
                    sums.s2[a * r + b] += wab;
                }
                sums.s1[a] += wa;
            }
        }
        sums
    });
    let mut total = Sums::zero(r);
    for s in &chunks {
        total.add(s);
    }

    let s0 = Rational::from_integer(total.s0.clone());
    let scale: Vec<Rational> = orders
        .iter()
        .map(|&k| rat_pow(eps, k as i64) / &n)
        .collect();
    let e1: Vec<Rational> = (0..r)
        .map(|a| Rational::from_integer(total.s1[a].clone()) / &s0 * &scale[a])
        .collect();
    let e2 = |a: usize, b: usize| {
        Rational::from_integer(total.s2[a * r + b].clone()) / &s0 * &scale[a] * &scale[b]
    };
    let e3 = |a: usize, b: usize, c: usize| {
        Rational::from_integer(total.s3[(a * r + b) * r + c].clone()) / &s0
            * &scale[a]
            * &scale[b]
            * &scale[c]
    };
    let covariance: Vec<Vec<Rational>> = (0..r)
        .map(|a| (0..r).map(|b| e2(a, b) - &e1[a] * &e1[b]).collect())
        .collect();
    let two = int(2);
    let third = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    (0..r)
                        .map(|c| {
                            e3(a, b, c) - e2(a, b) * &e1[c] - e2(a, c) * &e1[b] - e2(b, c) * &e1[a]
                                + &two * &e1[a] * &e1[b] * &e1[c]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(PushforwardStats {
        orders: orders.to_vec(),
        mean: e1,
        covariance,
        third,
    })
}
