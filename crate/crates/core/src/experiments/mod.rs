//! The desk-scale experiments behind the command-line tool: spectral data of
//! one irreducible, Kronecker products against free convolution and sums of
//! matrices, restriction against free compression and corners, and trace
//! fluctuations of sums of independent matrices.

mod config;

pub use config::ExperimentConfig;

use serde::Serialize;

use crate::cumulants::{estimate_cumulants, BootstrapOptions, Estimate, Samples};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::freeprob::{free_compress, free_convolve, MomentSequence};
use crate::repunitary::{
    branch_chain, exact_pushforward_stats_with, lr_tensor_decompose, naive_spectral, natural_spectral,
    pieri_decompose, spectral_moments, zelobenko_weights, ShiftedWeight, SpectralKind, WeightedDecomposition,
};
use crate::rmt::{trace_statistics, EnsembleSpec, Sampler, Scale, Spectrum, TraceTable};
use crate::scalar::{fmt_rational, int, rat, rat_pow, to_f64, Rational};

/// Exact value rendered both ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: f64,
}

impl ExactValue {
    pub fn new(r: &Rational) -> Self {
        ExactValue {
            exact: fmt_rational(r),
            decimal: to_f64(r),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Atom {
    pub at: ExactValue,
    pub weight: ExactValue,
}

/// Spectral data of one irreducible `eps rho_l`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub l: Vec<i64>,
    pub eps: ExactValue,
    pub gamma: Vec<ExactValue>,
    pub natural_measure: Vec<Atom>,
    #[serde(rename = "naiveMoments")]
    pub naive_moments: Vec<ExactValue>,
    #[serde(rename = "naturalMoments")]
    pub natural_moments: Vec<ExactValue>,
}

pub fn spectral_report(l: &ShiftedWeight, eps: &Rational, orders: usize) -> SpectralReport {
    let scale = |v: Vec<Rational>| {
        v.iter()
            .enumerate()
            .map(|(i, m)| ExactValue::new(&(m * rat_pow(eps, i as i64 + 1))))
            .collect()
    };
    SpectralReport {
        n: l.n(),
        l: l.entries().to_vec(),
        eps: ExactValue::new(eps),
        gamma: zelobenko_weights(l).iter().map(ExactValue::new).collect(),
        natural_measure: natural_spectral(l)
            .dilate(eps)
            .atoms()
            .iter()
            .map(|(x, w)| Atom {
                at: ExactValue::new(x),
                weight: ExactValue::new(w),
            })
            .collect(),
        naive_moments: scale(spectral_moments(l, orders, SpectralKind::Naive)),
        natural_moments: scale(spectral_moments(l, orders, SpectralKind::Natural)),
    }
}

fn unit_spec(lambda: &[i64], eps: f64) -> Result<EnsembleSpec> {
    let l = ShiftedWeight::from_highest(lambda)?;
    EnsembleSpec::new(
        l.n(),
        Spectrum::Fixed(l.entries().iter().map(|&x| int(x)).collect()),
        Scale::Float(eps),
    )
}

fn unit_moments(lambda: &[i64], k: usize) -> Result<MomentSequence<Rational>> {
    Ok(naive_spectral(&ShiftedWeight::from_highest(lambda)?).moments(k))
}

/// Bootstrap means of `tr X^p` for each recorded power.
pub fn trace_means(table: &TraceTable, opts: &BootstrapOptions) -> Result<Vec<Estimate<f64>>> {
    let samples = Samples::from_rows(&table.values)?;
    let requests: Vec<Vec<usize>> = (0..table.powers.len()).map(|i| vec![i]).collect();
    estimate_cumulants(&samples, &requests, opts)
}

fn relative_gap(value: f64, target: f64) -> f64 {
    if target == 0.0 {
        value.abs()
    } else {
        ((value - target) / target).abs()
    }
}

/// One `(n, k)` row of the Kronecker product experiment. Exact columns are
/// given at unit scale (multiply by `eps^k`, or `eps^2k` for variances).
#[derive(Clone, Debug, Serialize)]
pub struct TensorRow {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub lambda: Vec<i64>,
    pub mu: Vec<i64>,
    pub components: usize,
    pub rep_mean: f64,
    pub rep_var: f64,
    pub target: f64,
    pub gap: f64,
    pub mc_mean: Option<f64>,
    pub mc_se: Option<f64>,
    pub rep_mean_unit: Option<String>,
    pub rep_var_unit: Option<String>,
    pub target_unit: Option<String>,
    pub skipped: Option<String>,
}

fn tensor_decomposition(lambda: &[i64], mu: &[i64], n: usize) -> Result<WeightedDecomposition> {
    if mu.len() == n && mu[1..].iter().all(|&x| x == 0) && mu[0] >= 0 {
        pieri_decompose(lambda, mu[0], n)
    } else {
        lr_tensor_decompose(lambda, mu, n)
    }
}

/// Exact rep-side mean and variance of `m^_k(eps (rho_lambda (x) rho_mu))`,
/// the free convolution target and, when `replicas > 0`, Monte Carlo means of
/// `tr (X_1 + X_2)^k`. Guard refusals become skipped rows.
pub fn tensor_rows(cfg: &ExperimentConfig, exec: Exec, with_mc: bool) -> Result<Vec<TensorRow>> {
    cfg.validate()?;
    let orders: Vec<usize> = (1..=cfg.orders).collect();
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let (lambda, mu) = (cfg.lambda_at(n), cfg.mu_at(n));
        let eps = cfg.eps(n);
        let blank = |k: usize, reason: String| TensorRow {
            n,
            k,
            eps,
            lambda: lambda.clone(),
            mu: mu.clone(),
            components: 0,
            rep_mean: f64::NAN,
            rep_var: f64::NAN,
            target: f64::NAN,
            gap: f64::NAN,
            mc_mean: None,
            mc_se: None,
            rep_mean_unit: None,
            rep_var_unit: None,
            target_unit: None,
            skipped: Some(reason),
        };
        let d = match tensor_decomposition(&lambda, &mu, n) {
            Ok(d) => d,
            Err(e) if e.is_guard() => {
                rows.extend(orders.iter().map(|&k| blank(k, e.to_string())));
                continue;
            }
            Err(e) => return Err(e),
        };
        let stats = exact_pushforward_stats_with(&d, &int(1), &orders, SpectralKind::Naive, exec)?;
        let target = free_convolve(&unit_moments(&lambda, cfg.orders)?, &unit_moments(&mu, cfg.orders)?, cfg.orders)?;
        let mc = if with_mc {
            let sampler = Sampler::Sum(unit_spec(&lambda, eps)?, unit_spec(&mu, eps)?);
            let table = trace_statistics(&sampler, &orders, cfg.replicas, cfg.seed, exec)?;
            let opts = BootstrapOptions {
                resamples: cfg.bootstrap,
                seed: cfg.seed,
                exec,
            };
            Some(trace_means(&table, &opts)?)
        } else {
            None
        };
        for (i, &k) in orders.iter().enumerate() {
            let ek = eps.powi(k as i32);
            let mean = &stats.mean[i];
            let t = target.get(k);
            rows.push(TensorRow {
                n,
                k,
                eps,
                lambda: lambda.clone(),
                mu: mu.clone(),
                components: d.len(),
                rep_mean: to_f64(mean) * ek,
                rep_var: to_f64(stats.variance(i)) * ek * ek,
                target: to_f64(&t) * ek,
                gap: relative_gap(to_f64(mean), to_f64(&t)),
                mc_mean: mc.as_ref().map(|m| m[i].value),
                mc_se: mc.as_ref().map(|m| m[i].std_error),
                rep_mean_unit: Some(fmt_rational(mean)),
                rep_var_unit: Some(fmt_rational(stats.variance(i))),
                target_unit: Some(fmt_rational(&t)),
                skipped: None,
            });
        }
    }
    Ok(rows)
}

/// One `(n, k)` row of the restriction experiment; branching columns are
/// absent for matrix-only sizes.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictRow {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eps: f64,
    pub components: Option<usize>,
    pub branch_mean: Option<f64>,
    pub target: f64,
    pub gap: Option<f64>,
    pub corner_mc: Option<f64>,
    pub corner_se: Option<f64>,
    pub branch_mean_unit: Option<String>,
    pub target_unit: String,
    pub skipped: Option<String>,
}

/// Restriction `U(n) -> U(m)` of `eps rho_lambda` against the free compression
/// by `m / n` and Monte Carlo corners of `X(eps rho_lambda)`.
pub fn restrict_rows(cfg: &ExperimentConfig, exec: Exec, with_mc: bool) -> Result<Vec<RestrictRow>> {
    cfg.validate()?;
    if cfg.corner_n.contains(&0) {
        return Err(Error::invalid("corner sizes must be positive"));
    }
    let orders: Vec<usize> = (1..=cfg.orders).collect();
    let mut schedule: Vec<(usize, bool)> = cfg.n.iter().map(|&n| (n, true)).collect();
    schedule.extend(cfg.corner_n.iter().map(|&n| (n, false)));
    let opts = BootstrapOptions {
        resamples: cfg.bootstrap,
        seed: cfg.seed,
        exec,
    };
    let mut rows = Vec::new();
    for (n, exact) in schedule {
        let lambda = cfg.lambda_at(n);
        let m = cfg.m_at(n);
        let eps = cfg.eps(n);
        let alpha = rat(m as i64, n as i64);
        let target = free_compress(&unit_moments(&lambda, cfg.orders)?, &alpha, cfg.orders)?;
        let mut branch: Option<std::result::Result<(usize, Vec<Rational>), String>> = None;
        if exact {
            let l = ShiftedWeight::from_highest(&lambda)?;
            branch = Some(match branch_chain(&l, m) {
                Ok(d) => {
                    let stats = exact_pushforward_stats_with(&d, &int(1), &orders, SpectralKind::Naive, exec)?;
                    Ok((d.len(), stats.mean))
                }
                Err(e) if e.is_guard() => Err(e.to_string()),
                Err(e) => return Err(e),
            });
        }
        let mc = if with_mc {
            let sampler = Sampler::Corner(unit_spec(&lambda, eps)?, m);
            let table = trace_statistics(&sampler, &orders, cfg.replicas, cfg.seed, exec)?;
            Some(trace_means(&table, &opts)?)
        } else {
            None
        };
        for (i, &k) in orders.iter().enumerate() {
            let ek = eps.powi(k as i32);
            let t = target.get(k);
            let (components, mean, skipped) = match &branch {
                Some(Ok((c, means))) => (Some(*c), Some(&means[i]), None),
                Some(Err(reason)) => (None, None, Some(reason.clone())),
                None => (None, None, None),
            };
            rows.push(RestrictRow {
                n,
                m,
                k,
                eps,
                components,
                branch_mean: mean.map(|v| to_f64(v) * ek),
                target: to_f64(&t) * ek,
                gap: mean.map(|v| relative_gap(to_f64(v), to_f64(&t))),
                corner_mc: mc.as_ref().map(|e| e[i].value),
                corner_se: mc.as_ref().map(|e| e[i].std_error),
                branch_mean_unit: mean.map(fmt_rational),
                target_unit: fmt_rational(&t),
                skipped,
            });
        }
    }
    Ok(rows)
}

/// Scaled fluctuation statistics of `Tr X^p = n tr X^p` at one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct FluctuationRow {
    pub n: usize,
    pub p: usize,
    pub mean: Estimate<f64>,
    /// `n^2 Var(tr X^p)`.
    pub scaled_variance: Estimate<f64>,
    /// Third cumulant of `n (tr X^p - E tr X^p)`.
    pub scaled_third: Estimate<f64>,
}

/// The sampler of the fluctuation experiment at `n`: the sum of the two
/// profile factors, or a single ensemble when only `lambda` is given.
pub fn fluctuation_sampler(cfg: &ExperimentConfig, n: usize) -> Result<Sampler> {
    let eps = cfg.eps(n);
    let a = unit_spec(&cfg.lambda_at(n), eps)?;
    if cfg.lambda.is_some() && cfg.mu.is_none() {
        return Ok(Sampler::Single(a));
    }
    Ok(Sampler::Sum(a, unit_spec(&cfg.mu_at(n), eps)?))
}

/// Replica tables and scaled cumulant summaries for each `n`.
pub fn fluctuation_rows(cfg: &ExperimentConfig, exec: Exec) -> Result<(Vec<TraceTable>, Vec<FluctuationRow>)> {
    fluctuation_rows_with(cfg, exec, |n| fluctuation_sampler(cfg, n))
}

/// As [`fluctuation_rows`], with the ensemble at each `n` given by `sampler_for`.
pub fn fluctuation_rows_with(
    cfg: &ExperimentConfig,
    exec: Exec,
    sampler_for: impl Fn(usize) -> Result<Sampler>,
) -> Result<(Vec<TraceTable>, Vec<FluctuationRow>)> {
    cfg.validate()?;
    if cfg.powers.is_empty() || cfg.powers.contains(&0) {
        return Err(Error::invalid("powers must be positive"));
    }
    let opts = BootstrapOptions {
        resamples: cfg.bootstrap,
        seed: cfg.seed,
        exec,
    };
    let mut tables = Vec::new();
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let table = trace_statistics(&sampler_for(n)?, &cfg.powers, cfg.replicas, cfg.seed, exec)?;
        let means = trace_means(&table, &opts)?;
        let requests: Vec<Vec<usize>> = cfg
            .powers
            .iter()
            .flat_map(|&p| [vec![p, p], vec![p, p, p]])
            .collect();
        let cums = table.cumulants(&requests, &opts)?;
        for (i, &p) in cfg.powers.iter().enumerate() {
            rows.push(FluctuationRow {
                n,
                p,
                mean: means[i],
                scaled_variance: cums[2 * i],
                scaled_third: cums[2 * i + 1],
            });
        }
        tables.push(table);
    }
    Ok((tables, rows))
}
