use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num::{One, Zero};

use super::ensemble::EnsembleSpec;
use crate::combinat::Permutation;
use crate::error::{Error, Result};
use crate::scalar::{int, rat_pow, Rational};

/// Largest order of the exact Weingarten oracle.
pub const MAX_WEINGARTEN_K: usize = 5;

/// Unitary Weingarten function `Wg(., n)` on `S_k`, keyed by cycle type.
#[derive(Clone, Debug, PartialEq)]
pub struct WeingartenTable {
    k: usize,
    n: usize,
    pseudo: bool,
    values: BTreeMap<Vec<usize>, Rational>,
}

impl WeingartenTable {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True for the Moore-Penrose inverse used when `n < k`.
    pub fn is_pseudo_inverse(&self) -> bool {
        self.pseudo
    }

    pub fn class_value(&self, cycle_type: &[usize]) -> Option<&Rational> {
        self.values.get(cycle_type)
    }

    pub fn value(&self, sigma: &Permutation) -> Rational {
        self.values[&sigma.cycle_type()].clone()
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.values.iter()
    }

    /// `sum_tau Wg(sigma tau^-1) n^{#tau}` for every `sigma`, which is
    /// `[sigma = e]` for the true inverse.
    pub fn gram_residuals(&self) -> Vec<(Permutation, Rational)> {
        let perms = Permutation::all(self.k);
        let n = int(self.n as i64);
        perms
            .iter()
            .map(|s| {
                let total = perms.iter().fold(Rational::zero(), |acc, t| {
                    let st = s.compose(&t.inverse()).expect("same size");
                    acc + self.value(&st) * rat_pow(&n, t.num_cycles() as i64)
                });
                (s.clone(), total)
            })
            .collect()
    }
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::invalid("Weingarten order and dimension must be positive"));
    }
    if k > MAX_WEINGARTEN_K {
        return Err(Error::guard(format!(
            "exact Weingarten calculus is limited to k <= {MAX_WEINGARTEN_K}"
        )));
    }
    Ok(())
}

fn partitions_of(k: usize, max: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=k.min(max)).rev() {
        for mut rest in partitions_of(k - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exact solution of a square system, `None` when singular.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..m {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..m).map(|i| &b[i] / &a[i][i]).collect())
}

type Cache = Mutex<HashMap<(usize, usize, bool), Arc<WeingartenTable>>>;

fn cached(k: usize, n: usize, pseudo: bool, build: impl FnOnce() -> Result<WeingartenTable>) -> Result<Arc<WeingartenTable>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(k, n, pseudo)) {
        return Ok(t.clone());
    }
    let t = Arc::new(build()?);
    cache.lock().unwrap().insert((k, n, pseudo), t.clone());
    Ok(t)
}

/// `Wg(., n)` on `S_k` by exact inversion of the Gram form
/// `G(sigma, tau) = n^{#(sigma tau^-1)}`. Refuses `n < k`, where it is singular.
pub fn weingarten_table(k: usize, n: usize) -> Result<Arc<WeingartenTable>> {
    check_order(k, n)?;
    if n < k {
        return Err(Error::guard(format!(
            "Gram matrix is singular for n = {n} < k = {k}"
        )));
    }
    cached(k, n, false, || {
        let types = partitions_of(k, k);
        let perms = Permutation::all(k);
        let reps: Vec<Permutation> = types
            .iter()
            .map(|t| {
                let mut cycles = Vec::new();
                let mut start = 0;
                for &len in t {
                    cycles.push((start..start + len).collect::<Vec<_>>());
                    start += len;
                }
                let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
                Permutation::from_cycles(k, &refs).expect("valid cycles")
            })
            .collect();
        let index: HashMap<&Vec<usize>, usize> = types.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let nn = int(n as i64);
        let mut a = vec![vec![Rational::zero(); types.len()]; types.len()];
        let mut b = vec![Rational::zero(); types.len()];
        for (row, s) in reps.iter().enumerate() {
            if s.is_identity() {
                b[row] = Rational::one();
            }
            for t in &perms {
                let st = s.compose(&t.inverse()).expect("same size");
                a[row][index[&st.cycle_type()]] += rat_pow(&nn, t.num_cycles() as i64);
            }
        }
        let w = solve(a, b).ok_or_else(|| Error::guard("singular Gram system"))?;
        Ok(WeingartenTable {
            k,
            n,
            pseudo: false,
            values: types.into_iter().zip(w).collect(),
        })
    })
}

/// Group-algebra element of `C[S_k]`, coefficients in lexicographic order of `Permutation::all(k)`.
struct GroupAlgebra {
    perms: Vec<Permutation>,
    mult: Vec<Vec<usize>>,
}

impl GroupAlgebra {
    fn new(k: usize) -> Self {
        let perms = Permutation::all(k);
        let index: HashMap<&[usize], usize> = perms.iter().enumerate().map(|(i, p)| (p.images(), i)).collect();
        let mult = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index[a.compose(b).expect("same size").images()])
                    .collect()
            })
            .collect();
        GroupAlgebra { perms, mult }
    }

    fn convolve(&self, f: &[Rational], g: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); f.len()];
        for (i, fi) in f.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, gj) in g.iter().enumerate() {
                if !gj.is_zero() {
                    out[self.mult[i][j]] += fi * gj;
                }
            }
        }
        out
    }
}

/// Pseudo-inverse of the Gram element `G = sum_tau n^{#tau} tau`, which is
/// central with eigenvalue `prod_{boxes} (n + content)` on the isotypic
/// component of each `lambda |- k`. Agrees with [`weingarten_table`] when `n >= k`;
/// for `n < k` it inverts `G` on the components with at most `n` rows.
pub fn weingarten_pseudo(k: usize, n: usize) -> Result<Arc<WeingartenTable>> {
    check_order(k, n)?;
    cached(k, n, true, || {
        let alg = GroupAlgebra::new(k);
        let nn = n as i64;
        let g: Vec<Rational> = alg.perms.iter().map(|t| rat_pow(&int(nn), t.num_cycles() as i64)).collect();
        let mut eigen: Vec<i64> = partitions_of(k, k)
            .iter()
            .map(|lambda| {
                lambda
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &row)| (0..row).map(move |j| nn + j as i64 - i as i64))
                    .product()
            })
            .collect();
        eigen.sort_unstable();
        eigen.dedup();
        let identity: Vec<Rational> = alg
            .perms
            .iter()
            .map(|p| if p.is_identity() { Rational::one() } else { Rational::zero() })
            .collect();
        let mut wg = vec![Rational::zero(); identity.len()];
        for &theta in eigen.iter().filter(|&&t| t != 0) {
            // spectral projector prod_{theta' != theta} (G - theta') / (theta - theta')
            let mut proj = identity.clone();
            for &other in eigen.iter().filter(|&&t| t != theta) {
                let mut shifted = g.clone();
                for (s, e) in shifted.iter_mut().zip(&identity) {
                    *s -= e * int(other);
                }
                let scale = Rational::one() / int(theta - other);
                proj = alg.convolve(&proj, &shifted).into_iter().map(|x| x * &scale).collect();
            }
            let inv = Rational::one() / int(theta);
            for (w, p) in wg.iter_mut().zip(proj) {
                *w += p * &inv;
            }
        }
        let values = alg
            .perms
            .iter()
            .zip(wg)
            .map(|(p, w)| (p.cycle_type(), w))
            .collect();
        Ok(WeingartenTable {
            k,
            n,
            pseudo: true,
            values,
        })
    })
}

fn power_sum(d: &[Rational], p: usize) -> Rational {
    d.iter().map(|x| rat_pow(x, p as i64)).sum()
}

/// `Phi(sigma) = eps^k sum_tau Wg(sigma tau^-1) prod_{c in tau} p_{|c|}(d)`,
/// averaged over the mixture, for every `sigma` in `Permutation::all(k)` order.
/// Then `E[prod_t X_{i_t j_t}] = sum_sigma [i_t = j_{sigma(t)} for all t] Phi(sigma)`.
pub fn entry_moment_function(spec: &EnsembleSpec, wg: &WeingartenTable) -> Result<Vec<Rational>> {
    let eps = spec.scale().exact()?;
    let k = wg.order();
    let perms = Permutation::all(k);
    let eps_k = rat_pow(eps, k as i64);
    let mut out = vec![Rational::zero(); perms.len()];
    for (d, prob) in spec.atoms() {
        let sums: Vec<Rational> = (0..=k).map(|p| power_sum(d, p)).collect();
        let weights: Vec<Rational> = perms
            .iter()
            .map(|t| t.cycles().iter().map(|c| sums[c.len()].clone()).product())
            .collect();
        for (slot, s) in out.iter_mut().zip(&perms) {
            let v = perms.iter().zip(&weights).fold(Rational::zero(), |acc, (t, w)| {
                acc + wg.value(&s.compose(&t.inverse()).expect("same size")) * w
            });
            *slot += v * &prob * &eps_k;
        }
    }
    Ok(out)
}

/// Exact `E[X_{i_1 j_1} ... X_{i_k j_k}]` (0-based indices) for `X = eps U diag(d) U*`.
pub fn exact_entry_moment(spec: &EnsembleSpec, pairs: &[(usize, usize)]) -> Result<Rational> {
    let k = pairs.len();
    if k == 0 {
        return Ok(Rational::one());
    }
    let n = spec.n();
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(Error::invalid(format!("entry ({i}, {j}) outside a {n} x {n} matrix")));
    }
    let wg = weingarten_table(k, n)?;
    let phi = entry_moment_function(spec, &wg)?;
    Ok(moment_from_function(&phi, pairs))
}

/// `sum_sigma [i_t = j_{sigma(t)} for all t] phi(sigma)`; the indices are
/// only compared, so any labels work.
pub(crate) fn moment_from_function(phi: &[Rational], pairs: &[(usize, usize)]) -> Rational {
    Permutation::all(pairs.len())
        .iter()
        .zip(phi)
        .filter(|(s, _)| pairs.iter().enumerate().all(|(t, &(i, _))| i == pairs[s.apply(t)].1))
        .map(|(_, v)| v.clone())
        .sum()
}
