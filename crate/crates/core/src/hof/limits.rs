use serde::Serialize;

use super::kappa::{kappa_exact, kappa_extended, trace_cumulant_exact, KappaTable};
use crate::combinat::{gamma_perm, enumerate_pp, PartitionedPermutation};
use crate::error::{Error, Result};
use crate::rmt::EnsembleSpec;
use crate::scalar::{fmt_rational, int, rat_pow, to_f64, Rational};

/// Scaled values along an `n` schedule with a Richardson estimate of the limit.
#[derive(Clone, Debug, Serialize)]
pub struct Trend {
    pub n: Vec<usize>,
    /// Exact scaled values as `"p/q"`.
    pub exact: Vec<String>,
    pub values: Vec<f64>,
    /// Successive differences of `values`.
    pub increments: Vec<f64>,
    /// Limit from the last two points under a `c/n` correction.
    pub richardson: f64,
}

impl Trend {
    fn new(n: &[usize], exact: Vec<Rational>) -> Self {
        let values: Vec<f64> = exact.iter().map(to_f64).collect();
        let increments = values.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n.len();
        let (n1, n2) = (n[m - 2] as f64, n[m - 1] as f64);
        let richardson = (n2 * values[m - 1] - n1 * values[m - 2]) / (n2 - n1);
        Trend {
            n: n.to_vec(),
            exact: exact.iter().map(fmt_rational).collect(),
            values,
            increments,
            richardson,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaLimit {
    /// Conjugacy class: the cycle lengths inside each block.
    pub class: Vec<Vec<usize>>,
    pub representative: String,
    /// `n^{|(V, pi)|} kappa_(V, pi)`.
    pub trend: Trend,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentLimit {
    pub powers: Vec<usize>,
    /// `n^{2(l-1)} k_l(tr X^{p_1}, ..)`.
    pub trend: Trend,
    /// `sum_{(V, pi) <= (1_k, gamma)} n^{|(V, pi)|} kappa_(V, pi)`.
    pub cumulant_side: Trend,
    /// `|M - sum K|` relative to the larger side, at the largest `n`.
    pub gap: f64,
    pub consistent: bool,
}

/// Limits of scaled microscopic cumulants `K` and trace cumulants `M` along a schedule.
#[derive(Clone, Debug, Serialize)]
pub struct LimitRecord {
    pub tolerance: f64,
    pub kappa: Vec<KappaLimit>,
    pub moments: Vec<MomentLimit>,
}

impl LimitRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// What to track in [`limit_scan`].
#[derive(Clone, Debug, Default)]
pub struct LimitTargets {
    pub kappa: Vec<PartitionedPermutation>,
    pub moments: Vec<Vec<usize>>,
}

fn table_for(spec: &EnsembleSpec, k: usize) -> Result<KappaTable<Rational>> {
    if spec.n() >= k {
        kappa_exact(spec, k)
    } else {
        kappa_extended(spec, k)
    }
}

/// Evaluates the scaled quantities exactly at each `n` of an increasing
/// schedule (at least 3 points), and checks `M = sum_{(V, pi) <= (1_k, gamma)} K`
/// at the largest `n` within `tolerance`.
pub fn limit_scan(
    schedule: &[usize],
    spec_for: impl Fn(usize) -> Result<EnsembleSpec>,
    targets: &LimitTargets,
    tolerance: f64,
) -> Result<LimitRecord> {
    if schedule.len() < 3 {
        return Err(Error::invalid("a limit scan needs at least 3 values of n"));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("the n schedule must be strictly increasing"));
    }
    let specs = schedule.iter().map(|&n| spec_for(n)).collect::<Result<Vec<_>>>()?;
    if let Some((s, &n)) = specs.iter().zip(schedule).find(|(s, &n)| s.n() != n) {
        return Err(Error::GroundSetMismatch { left: n, right: s.n() });
    }
    let mut orders: Vec<usize> = targets
        .kappa
        .iter()
        .map(PartitionedPermutation::size)
        .chain(targets.moments.iter().map(|p| p.iter().sum()))
        .collect();
    orders.sort_unstable();
    orders.dedup();
    let tables = specs
        .iter()
        .map(|s| orders.iter().map(|&k| Ok((k, table_for(s, k)?))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let table = |i: usize, k: usize| &tables[i].iter().find(|(o, _)| *o == k).expect("built").1;

    let mut kappa = Vec::new();
    for vp in &targets.kappa {
        let exact = (0..specs.len())
            .map(|i| table(i, vp.size()).scaled(vp).expect("complete table"))
            .collect();
        kappa.push(KappaLimit {
            class: vp.conjugacy_key(),
            representative: vp.to_string(),
            trend: Trend::new(schedule, exact),
        });
    }

    let mut moments = Vec::new();
    for ps in &targets.moments {
        let k: usize = ps.iter().sum();
        let l = ps.len() as i64;
        let top = PartitionedPermutation::full(gamma_perm(ps)?);
        let below: Vec<PartitionedPermutation> = enumerate_pp(k)?
            .filter(|vp| vp.leq(&top).unwrap_or(false))
            .collect();
        let mut m_side = Vec::new();
        let mut k_side = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            let n = int(spec.n() as i64);
            // n^{2(l-1)} k(tr ..) = n^{l-2} k(Tr ..)
            m_side.push(trace_cumulant_exact(spec, ps)? * rat_pow(&n, l - 2));
            k_side.push(below.iter().map(|vp| table(i, k).scaled(vp).expect("complete table")).sum());
        }
        let m_trend = Trend::new(schedule, m_side);
        let k_trend = Trend::new(schedule, k_side);
        let (a, b) = (*m_trend.values.last().unwrap(), *k_trend.values.last().unwrap());
        let scale = a.abs().max(b.abs());
        let gap = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        moments.push(MomentLimit {
            powers: ps.clone(),
            trend: m_trend,
            cumulant_side: k_trend,
            gap,
            consistent: gap <= tolerance,
        });
    }
    Ok(LimitRecord {
        tolerance,
        kappa,
        moments,
    })
}
