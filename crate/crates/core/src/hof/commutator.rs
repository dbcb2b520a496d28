use num::Zero;
use serde::Serialize;

use crate::combinat::{enumerate_pp, PartitionedPermutation, SetPartition};
use crate::error::{Error, Result};
use crate::repunitary::{spectral_moments, ShiftedWeight, SpectralKind};
use crate::scalar::{int, to_f64, Rational};

/// Orders `k` of `(V, pi)` handled by [`commutator_decay_check`].
pub const COMMUTATOR_ORDERS: [usize; 2] = [2, 3];

/// A linear combination of generators `sum c e_{ab}`.
type Linear = Vec<(Rational, usize, usize)>;

/// First and second moments of the generators `e_ab` under the normalized
/// trace of an irreducible representation: `E e_ab = [a = b] C_1 / n` and
/// `E e_ab e_cd = [a = d][b = c] c_1 + [a = b][c = d] c_2`, with `c_1, c_2`
/// fixed by the Casimir values `sum_ab e_ab e_ba = C_2` and `(sum_a e_aa)^2 = C_1^2`.
struct GeneratorMoments {
    first: Rational,
    c1: Rational,
    c2: Rational,
}

impl GeneratorMoments {
    fn new(l: &ShiftedWeight) -> Self {
        let n = l.n() as i64;
        // C_k = n m_k of the natural spectral measure
        let m = spectral_moments(l, 2, SpectralKind::Natural);
        let nn = int(n);
        let cas1 = &m[0] * &nn;
        let cas2 = &m[1] * &nn;
        if n == 1 {
            return GeneratorMoments {
                first: cas1.clone(),
                c1: Rational::zero(),
                c2: cas2,
            };
        }
        let c1 = (&nn * &cas2 - &cas1 * &cas1) / int(n * (n * n - 1));
        let c2 = (&cas1 * &cas1 - &nn * &c1) / int(n * n);
        GeneratorMoments {
            first: cas1 / nn,
            c1,
            c2,
        }
    }

    fn mean(&self, x: &Linear) -> Rational {
        x.iter()
            .filter(|(_, a, b)| a == b)
            .map(|(c, _, _)| c * &self.first)
            .sum()
    }

    fn product(&self, x: &Linear, y: &Linear) -> Rational {
        let mut acc = Rational::zero();
        for (cx, a, b) in x {
            for (cy, c, d) in y {
                let mut v = Rational::zero();
                if a == d && b == c {
                    v += &self.c1;
                }
                if a == b && c == d {
                    v += &self.c2;
                }
                acc += cx * cy * v;
            }
        }
        acc
    }
}

/// `[e_ab, e_cd] = [b = c] e_ad - [d = a] e_cb`.
fn bracket(a: usize, b: usize, c: usize, d: usize) -> Linear {
    let mut out = Vec::new();
    if b == c {
        out.push((int(1), a, d));
    }
    if d == a {
        out.push((int(-1), c, b));
    }
    out
}

/// `k_{V'}(e_{1 pi(1)}, .., [e_{i pi(i)}, e_{i+1 pi(i+1)}], .., e_{k pi(k)})` at unit
/// scale; the argument list has `k - 1` entries and `V'` merges `i, i+1`.
fn commutator_cumulant(m: &GeneratorMoments, vp: &PartitionedPermutation, i: usize) -> Rational {
    let k = vp.size();
    let pi = vp.permutation();
    let mut args: Vec<Linear> = Vec::new();
    let mut labels = Vec::new();
    for t in 0..k {
        if t == i + 1 {
            continue;
        }
        labels.push(vp.partition().block_of(t));
        if t == i {
            args.push(bracket(i, pi.apply(i), i + 1, pi.apply(i + 1)));
        } else {
            args.push(vec![(int(1), t, pi.apply(t))]);
        }
    }
    let merged = SetPartition::from_labels(&labels);
    merged.blocks().iter().fold(int(1), |acc, b| {
        acc * match b.as_slice() {
            [x] => m.mean(&args[*x]),
            [x, y] => m.product(&args[*x], &args[*y]) - m.mean(&args[*x]) * m.mean(&args[*y]),
            _ => unreachable!("blocks of V' have at most 2 elements for k <= 3"),
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorRow {
    pub pp: String,
    /// 0-based position of the bracket.
    pub i: usize,
    pub length: usize,
    pub n: Vec<usize>,
    /// `n^{|(V, pi)|} eps_n^k |k_{V'}(..)|`.
    pub scaled: Vec<f64>,
    pub decays: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    pub exponent: f64,
    pub orders: Vec<usize>,
    pub rows: Vec<CommutatorRow>,
    pub all_decay: bool,
}

/// Evaluates the commutator cumulants of `X = eps_n rho_n(e_ij)` for the
/// irreducibles with shifted weights `weights` (increasing `n`),
/// `eps_n = n^-a`, over every `(V, pi)` of order `k` in `orders` and every
/// bracket position joined by `V`, and reports whether
/// `n^{|(V, pi)|}`-scaled values decrease along the schedule.
pub fn commutator_decay_check(weights: &[ShiftedWeight], a: f64, orders: &[usize]) -> Result<CommutatorReport> {
    if let Some(k) = orders.iter().find(|k| !COMMUTATOR_ORDERS.contains(k)) {
        return Err(Error::guard(format!(
            "commutator cumulants are implemented for k in {COMMUTATOR_ORDERS:?} only (requested {k})"
        )));
    }
    if !(a > 1.0) {
        let note = if a == 1.0 { " (eps_n = 1/n is the boundary case)" } else { "" };
        return Err(Error::guard(format!(
            "eps_n = n^-a must be o(1/n), which needs a > 1; got a = {a}{note}"
        )));
    }
    if weights.len() < 2 || weights.windows(2).any(|w| w[0].n() >= w[1].n()) {
        return Err(Error::invalid("need at least two weights with increasing n"));
    }
    let ns: Vec<usize> = weights.iter().map(ShiftedWeight::n).collect();
    let moments: Vec<GeneratorMoments> = weights.iter().map(GeneratorMoments::new).collect();
    let mut rows = Vec::new();
    for &k in orders {
        if ns[0] < k {
            return Err(Error::invalid(format!("entries up to index {k} need n >= {k}")));
        }
        for vp in enumerate_pp(k)? {
            for i in 0..k - 1 {
                if !vp.partition().same_block(i, i + 1) {
                    continue;
                }
                let scaled: Vec<f64> = ns
                    .iter()
                    .zip(&moments)
                    .map(|(&n, m)| {
                        let nf = n as f64;
                        let eps = nf.powf(-a);
                        nf.powi(vp.length() as i32) * eps.powi(k as i32) * to_f64(&commutator_cumulant(m, &vp, i)).abs()
                    })
                    .collect();
                let decays = scaled.iter().all(|&v| v == 0.0)
                    || (scaled.windows(2).all(|w| w[1] <= w[0]) && scaled.last() < scaled.first());
                rows.push(CommutatorRow {
                    pp: vp.to_string(),
                    i,
                    length: vp.length(),
                    n: ns.clone(),
                    scaled,
                    decays,
                });
            }
        }
    }
    let all_decay = rows.iter().all(|r| r.decays);
    Ok(CommutatorReport {
        exponent: a,
        orders: orders.to_vec(),
        rows,
        all_decay,
    })
}

/// Quadratic Casimir `sum_ab e_ab e_ba` on the irreducible with shifted weight `l`.
pub fn quadratic_casimir(l: &ShiftedWeight) -> Rational {
    let m = spectral_moments(l, 2, SpectralKind::Natural);
    &m[1] * int(l.n() as i64)
}
