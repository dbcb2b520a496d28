use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num::Zero;
use serde::Serialize;

use crate::combinat::{enumerate_pp, gamma_perm, mobius, PartitionedPermutation, Permutation, SetPartition};
use crate::cumulants::{estimate_cumulant_products, moments_to_cumulants, BootstrapOptions, MomentTable, Samples};
use crate::error::{Error, Result};
use crate::rmt::{
    entry_moment_function, exact_entry_moment, moment_from_function, weingarten_pseudo, weingarten_table,
    EnsembleSpec, Sampler, MAX_WEINGARTEN_K,
};
use crate::scalar::{fmt_rational, rat_pow, Complex64, Rational, Scalar};

/// Largest order of exact microscopic cumulant tables.
pub const MAX_KAPPA_ORDER: usize = 4;

/// Least number of replicas accepted by [`kappa_mc`].
pub const MIN_KAPPA_REPLICAS: usize = 1000;

/// Microscopic cumulants `kappa_(V, pi) = k_V(X_{1 pi(1)}, .., X_{k pi(k)})`
/// indexed by partitioned permutations; pairs with `pi` not below `V` are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaTable<T> {
    order: usize,
    n: usize,
    values: BTreeMap<PartitionedPermutation, T>,
    std_errors: BTreeMap<PartitionedPermutation, f64>,
}

impl<T: Scalar> KappaTable<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, vp: &PartitionedPermutation) -> Option<&T> {
        self.values.get(vp)
    }

    /// Bootstrap standard error, for Monte Carlo tables.
    pub fn std_error(&self, vp: &PartitionedPermutation) -> Option<f64> {
        self.std_errors.get(vp).copied()
    }

    /// `kappa_(V, pi)`, which is 0 unless every cycle of `pi` lies in a block of `V`.
    pub fn value(&self, v: &SetPartition, pi: &Permutation) -> Result<T> {
        if v.size() != self.order || pi.size() != self.order {
            return Err(Error::GroundSetMismatch {
                left: self.order,
                right: v.size().max(pi.size()),
            });
        }
        if !pi.refines(v) {
            return Ok(T::zero());
        }
        let vp = PartitionedPermutation::new(v.clone(), pi.clone())?;
        self.values
            .get(&vp)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("{vp} is not in the table")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&PartitionedPermutation, &T)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pairs of conjugate entries with different values.
    pub fn conjugacy_violations(&self) -> Vec<(PartitionedPermutation, PartitionedPermutation)> {
        let mut first: HashMap<_, (&PartitionedPermutation, &T)> = HashMap::new();
        let mut out = Vec::new();
        for (vp, value) in &self.values {
            let (rep, v) = *first.entry(vp.conjugacy_key()).or_insert((vp, value));
            if v != value {
                out.push((rep.clone(), vp.clone()));
            }
        }
        out
    }
}

fn check_kappa_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("order must be positive"));
    }
    if k > MAX_KAPPA_ORDER {
        return Err(Error::guard(format!(
            "exact microscopic cumulants are limited to k <= {MAX_KAPPA_ORDER}"
        )));
    }
    Ok(())
}

/// Block moments `E[prod_{t in B} X_{t pi(t)}]`, memoized per block and
/// restriction of `pi`; `moment` receives the relabeled index pairs.
struct BlockMoments<F> {
    moment: F,
    memo: HashMap<(Vec<usize>, Vec<usize>), Rational>,
}

impl<F: FnMut(&[(usize, usize)]) -> Result<Rational>> BlockMoments<F> {
    fn get(&mut self, block: &[usize], pi: &Permutation) -> Result<Rational> {
        let images: Vec<usize> = block.iter().map(|&t| pi.apply(t)).collect();
        let key = (block.to_vec(), images);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let pairs: Vec<(usize, usize)> = block.iter().map(|&t| (t, pi.apply(t))).collect();
        let v = (self.moment)(&pairs)?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    /// `k_V` of the designated entries by Mobius inversion of `E_W = prod_B E_B`.
    fn cumulant(&mut self, v: &SetPartition, pi: &Permutation) -> Result<Rational> {
        let mut acc = Rational::zero();
        for w in SetPartition::all(v.size()).into_iter().filter(|w| w.leq(v)) {
            let mut term = Rational::from_integer(mobius(&w, v)?.into());
            for b in w.blocks() {
                if term.is_zero() {
                    break;
                }
                term *= self.get(&b, pi)?;
            }
            acc += term;
        }
        Ok(acc)
    }
}

fn exact_moments(spec: &EnsembleSpec, k: usize) -> Result<impl FnMut(&[(usize, usize)]) -> Result<Rational> + '_> {
    if spec.n() < k {
        return Err(Error::guard(format!(
            "the entries X_(t, pi(t)) need n >= k, got n = {} < k = {k}",
            spec.n()
        )));
    }
    Ok(move |pairs: &[(usize, usize)]| exact_entry_moment(spec, pairs))
}

/// `k_V(X_{1 pi(1)}, .., X_{k pi(k)})` for any pair `(V, pi)`, exactly.
pub fn kappa_exact_pair(spec: &EnsembleSpec, v: &SetPartition, pi: &Permutation) -> Result<Rational> {
    if v.size() != pi.size() {
        return Err(Error::GroundSetMismatch {
            left: v.size(),
            right: pi.size(),
        });
    }
    check_kappa_order(v.size())?;
    let mut blocks = BlockMoments {
        moment: exact_moments(spec, v.size())?,
        memo: HashMap::new(),
    };
    blocks.cumulant(v, pi)
}

fn build_table(
    n: usize,
    k: usize,
    mut moment: impl FnMut(&[(usize, usize)]) -> Result<Rational>,
) -> Result<KappaTable<Rational>> {
    let mut blocks = BlockMoments {
        moment: &mut moment,
        memo: HashMap::new(),
    };
    let mut values = BTreeMap::new();
    for vp in enumerate_pp(k)? {
        let value = blocks.cumulant(vp.partition(), vp.permutation())?;
        values.insert(vp, value);
    }
    Ok(KappaTable {
        order: k,
        n,
        values,
        std_errors: BTreeMap::new(),
    })
}

/// Exact table of `kappa_(V, pi)` over all partitioned permutations of
/// `0..k`, from Weingarten entry moments. Requires `n >= k`.
pub fn kappa_exact(spec: &EnsembleSpec, k: usize) -> Result<KappaTable<Rational>> {
    check_kappa_order(k)?;
    build_table(spec.n(), k, exact_moments(spec, k)?)
}

/// The table of [`kappa_exact`] continued to `n < k`.
///
/// Block moments are taken from the Weingarten expansion with formally
/// distinct indices and the pseudo-inverse of the Gram form, which keeps the
/// index expansion `k_V(X_{i_1 j_1}, ..) = sum_pi [j = i o pi] kappa_(V, pi)`
/// valid for every `n`. Equal to [`kappa_exact`] when `n >= k`.
pub fn kappa_extended(spec: &EnsembleSpec, k: usize) -> Result<KappaTable<Rational>> {
    check_kappa_order(k)?;
    let n = spec.n();
    let phis = (1..=k.min(MAX_WEINGARTEN_K))
        .map(|m| {
            let wg = if n >= m { weingarten_table(m, n)? } else { weingarten_pseudo(m, n)? };
            entry_moment_function(spec, &wg)
        })
        .collect::<Result<Vec<_>>>()?;
    build_table(n, k, |pairs| Ok(moment_from_function(&phis[pairs.len() - 1], pairs)))
}

/// Monte Carlo estimate of `kappa_(V, pi)` for the listed pairs, from the
/// entries `X_{t pi(t)}` of independent replicas, with bootstrap errors.
pub fn kappa_mc(
    sampler: &Sampler,
    k: usize,
    targets: &[PartitionedPermutation],
    replicas: usize,
    seed: u64,
    opts: &BootstrapOptions,
) -> Result<KappaTable<Complex64>> {
    if replicas < MIN_KAPPA_REPLICAS {
        return Err(Error::invalid(format!(
            "need at least {MIN_KAPPA_REPLICAS} replicas, got {replicas}"
        )));
    }
    if k == 0 || k > sampler.n() {
        return Err(Error::guard(format!("entries X_(t, pi(t)) need 1 <= k <= n, got k = {k}")));
    }
    if let Some(bad) = targets.iter().find(|vp| vp.size() != k) {
        return Err(Error::GroundSetMismatch {
            left: k,
            right: bad.size(),
        });
    }
    sampler.validate()?;
    let mut columns: Vec<(usize, usize)> = targets
        .iter()
        .flat_map(|vp| (0..k).map(|t| (t, vp.permutation().apply(t))))
        .collect();
    columns.sort_unstable();
    columns.dedup();
    let rows = opts
        .exec
        .map_indexed(replicas, |r| {
            sampler
                .replica(seed, r as u64)
                .map(|x| columns.iter().map(|&(i, j)| x.matrix[(i, j)]).collect::<Vec<_>>())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let samples = Samples::from_rows(&rows)?;
    let col = |pair: (usize, usize)| columns.binary_search(&pair).expect("collected");
    let requests: Vec<Vec<Vec<usize>>> = targets
        .iter()
        .map(|vp| {
            vp.partition()
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&t| col((t, vp.permutation().apply(t)))).collect())
                .collect()
        })
        .collect();
    let est = estimate_cumulant_products(&samples, &requests, opts)?;
    let mut values = BTreeMap::new();
    let mut std_errors = BTreeMap::new();
    for (vp, e) in targets.iter().zip(est) {
        values.insert(vp.clone(), e.value);
        std_errors.insert(vp.clone(), e.std_error);
    }
    Ok(KappaTable {
        order: k,
        n: sampler.n(),
        values,
        std_errors,
    })
}

/// Right-hand side of the macro/micro relation:
/// `k(Tr X^{p_1}, .., Tr X^{p_l}) = sum_{(V, pi) : V v C(gamma) = 1} kappa_(V, pi) n^{#(gamma pi^-1)}`.
pub fn macro_from_micro<T: Scalar>(kt: &KappaTable<T>, ps: &[usize], n: usize) -> Result<T> {
    let gamma = gamma_perm(ps)?;
    let k = gamma.size();
    if k != kt.order() {
        return Err(Error::GroundSetMismatch {
            left: kt.order(),
            right: k,
        });
    }
    let top = SetPartition::coarsest(k);
    let cg = gamma.cycle_partition();
    let nn = i64::try_from(n).map_err(|_| Error::invalid("n too large"))?;
    let mut acc = T::zero();
    for vp in enumerate_pp(k)? {
        if vp.partition().join(&cg)? != top {
            continue;
        }
        let kappa = kt
            .get(&vp)
            .ok_or_else(|| Error::invalid(format!("{vp} is not in the table")))?;
        let cycles = gamma.compose(&vp.permutation().inverse())?.num_cycles() as u32;
        acc = acc + kappa.clone() * T::from_i64(nn.pow(cycles));
    }
    Ok(acc)
}

/// `k(Tr X^{p_1}, .., Tr X^{p_l})` computed directly from the law of the
/// spectrum: traces are functions of the spectrum only.
pub fn trace_cumulant_exact(spec: &EnsembleSpec, ps: &[usize]) -> Result<Rational> {
    if ps.is_empty() || ps.contains(&0) {
        return Err(Error::invalid("powers must be positive"));
    }
    let eps = spec.scale().exact()?;
    let atoms: Vec<(Vec<Rational>, Rational)> = spec
        .atoms()
        .into_iter()
        .map(|(d, p)| {
            let traces = ps
                .iter()
                .map(|&q| d.iter().map(|x| rat_pow(x, q as i64)).sum::<Rational>() * rat_pow(eps, q as i64))
                .collect();
            (traces, p)
        })
        .collect();
    let table = MomentTable::from_block_fn(ps.len(), |s| {
        atoms.iter().fold(Rational::zero(), |acc, (tr, p)| {
            acc + s.iter().fold(p.clone(), |m, &i| m * &tr[i])
        })
    })?;
    Ok(moments_to_cumulants(&table).top())
}

/// One evaluation of the macro/micro identity.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub n: usize,
    pub powers: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
    pub extended: bool,
    pub pass: bool,
}

/// All compositions of `1..=max_total` (ordered tuples of positive parts).
pub fn compositions_up_to(max_total: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for p in 1..=left {
            current.push(p);
            rec(left - p, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for total in 1..=max_total {
        rec(total, &mut Vec::new(), &mut out);
    }
    out
}

/// Checks the macro/micro identity exactly for every composition of total at
/// most `max_total`. With `extend`, orders above `n` use [`kappa_extended`];
/// otherwise they are refused.
pub fn verify_macro_micro(spec: &EnsembleSpec, max_total: usize, extend: bool) -> Result<Vec<IdentityCheck>> {
    let n = spec.n();
    let mut tables: HashMap<usize, KappaTable<Rational>> = HashMap::new();
    let mut out = Vec::new();
    for ps in compositions_up_to(max_total) {
        let k: usize = ps.iter().sum();
        let extended = n < k;
        if extended && !extend {
            return Err(Error::guard(format!(
                "Weingarten calculus needs n >= k; got n = {n}, k = {k}"
            )));
        }
        let table = match tables.entry(k) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(if extended { kappa_extended(spec, k)? } else { kappa_exact(spec, k)? }),
        };
        let lhs = trace_cumulant_exact(spec, &ps)?;
        let rhs = macro_from_micro(table, &ps, n)?;
        out.push(IdentityCheck {
            n,
            powers: ps,
            pass: lhs == rhs,
            lhs: fmt_rational(&lhs),
            rhs: fmt_rational(&rhs),
            extended,
        });
    }
    Ok(out)
}

impl KappaTable<Rational> {
    /// `n^{|(V, pi)|} kappa_(V, pi)`.
    pub fn scaled(&self, vp: &PartitionedPermutation) -> Option<Rational> {
        let n = Rational::from_integer((self.n as i64).into());
        self.get(vp).map(|v| v * rat_pow(&n, vp.length() as i64))
    }
}
