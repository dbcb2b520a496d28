use serde::Serialize;

use crate::combinat::{enumerate_pp, gamma_perm, scaling_exponent, PartitionedPermutation, Permutation, SetPartition};
use crate::error::Result;

/// Exhaustive check of `|(0, gamma pi^-1)| + |(V, pi)| >= |(1_k, gamma)|` over
/// the summation domain `V v C(gamma) = 1_k`, with equality exactly for
/// `(V, pi) <= (1_k, gamma)`.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleRow {
    pub k: usize,
    pub gamma: Vec<usize>,
    /// Number of `(V, pi)` in the summation domain.
    pub domain: usize,
    pub min_exponent: i64,
    /// Domain elements with exponent 0.
    pub equalities: usize,
    pub pass: bool,
}

/// One row per `k <= max_k` and cycle type of `gamma`.
pub fn triangle_check(max_k: usize) -> Result<Vec<TriangleRow>> {
    let mut rows = Vec::new();
    for k in 1..=max_k {
        let pps: Vec<PartitionedPermutation> = enumerate_pp(k)?.collect();
        let one = SetPartition::coarsest(k);
        for t in cycle_types(k) {
            let gamma = gamma_perm(&t)?;
            let top = PartitionedPermutation::full(gamma.clone());
            let cg = gamma.cycle_partition();
            let mut row = TriangleRow {
                k,
                gamma: t,
                domain: 0,
                min_exponent: i64::MAX,
                equalities: 0,
                pass: true,
            };
            for vp in &pps {
                if vp.partition().join(&cg)? != one {
                    continue;
                }
                let e = scaling_exponent(vp, &gamma)?;
                row.domain += 1;
                row.min_exponent = row.min_exponent.min(e);
                row.equalities += usize::from(e == 0);
                row.pass &= e >= 0 && (e == 0) == vp.leq(&top)?;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Partitions of `k` in decreasing order, as cycle types.
fn cycle_types(k: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// Exponents of every `(V, pi)` on `k` points against `gamma`.
pub fn exponent_table(gamma: &Permutation) -> Result<Vec<(String, i64)>> {
    enumerate_pp(gamma.size())?
        .map(|vp| Ok((vp.to_string(), scaling_exponent(&vp, gamma)?)))
        .collect()
}
