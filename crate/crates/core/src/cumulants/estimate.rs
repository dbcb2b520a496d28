use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::table::{moments_to_cumulants, MomentTable};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{Complex64, Scalar};

/// Largest total order accepted by the estimator.
pub const MAX_ESTIMATE_ORDER: usize = 4;

/// Floating scalars that can be averaged and bootstrapped.
pub trait SampleScalar: Scalar + Copy {
    fn norm_sqr(self) -> f64;
}

impl SampleScalar for f64 {
    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl SampleScalar for Complex64 {
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

/// Replica-by-variable sample matrix.
#[derive(Clone, Debug)]
pub struct Samples<T> {
    replicas: usize,
    vars: usize,
    data: Vec<T>,
}

impl<T: SampleScalar> Samples<T> {
    /// One row per replica.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let vars = rows.first().map(Vec::len).unwrap_or(0);
        if rows.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 replicas, got {}",
                rows.len()
            )));
        }
        if vars == 0 || rows.iter().any(|r| r.len() != vars) {
            return Err(Error::invalid("rows must be nonempty and of equal length"));
        }
        Ok(Samples {
            replicas: rows.len(),
            vars,
            data: rows.concat(),
        })
    }

    /// One column per variable.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let replicas = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|c| c.len() != replicas) {
            return Err(Error::invalid("columns must have equal length"));
        }
        let rows: Vec<Vec<T>> = (0..replicas)
            .map(|r| columns.iter().map(|c| c[r]).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn get(&self, replica: usize, var: usize) -> T {
        self.data[replica * self.vars + var]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            resamples: 200,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: f64,
}

fn check_request<T>(samples: &Samples<T>, vars: &[usize]) -> Result<()> {
    if vars.is_empty() || vars.len() > MAX_ESTIMATE_ORDER {
        return Err(Error::invalid(format!(
            "cumulant order must be between 1 and {MAX_ESTIMATE_ORDER}"
        )));
    }
    if let Some(&v) = vars.iter().find(|&&v| v >= samples.vars) {
        return Err(Error::invalid(format!("variable {v} out of range")));
    }
    Ok(())
}

/// Plug-in joint cumulant over the selected rows.
///
/// Data are shifted by the first selected row and centered before the
/// moments are taken, so constant data give exactly 0 for order >= 2.
fn plug_in<T: SampleScalar>(samples: &Samples<T>, rows: &[usize], vars: &[usize]) -> T {
    let count = T::from_i64(rows.len() as i64);
    let m = vars.len();
    if m == 1 {
        let sum = rows.iter().fold(T::zero(), |acc, &r| acc + samples.get(r, vars[0]));
        return sum / count;
    }
    let reference: Vec<T> = vars.iter().map(|&v| samples.get(rows[0], v)).collect();
    let means: Vec<T> = (0..m)
        .map(|t| {
            rows.iter()
                .fold(T::zero(), |acc, &r| acc + (samples.get(r, vars[t]) - reference[t]))
                / count
        })
        .collect();
    let mut sums = vec![T::zero(); 1 << m];
    let mut centered = vec![T::zero(); m];
    let mut prod = vec![T::one(); 1 << m];
    for &r in rows {
        for t in 0..m {
            centered[t] = samples.get(r, vars[t]) - reference[t] - means[t];
        }
        for mask in 1usize..1 << m {
            let low = mask.trailing_zeros() as usize;
            prod[mask] = prod[mask & (mask - 1)] * centered[low];
            sums[mask] = sums[mask] + prod[mask];
        }
    }
    let table = MomentTable::from_block_fn(m, |block| {
        if block.len() == 1 {
            T::zero()
        } else {
            sums[block.iter().fold(0, |mk, &i| mk | 1 << i)] / count
        }
    })
    .expect("order checked");
    moments_to_cumulants(&table).top()
}

/// Plug-in estimate of `k(X_{v_1}, .., X_{v_m})` over all replicas.
pub fn joint_cumulant<T: SampleScalar>(samples: &Samples<T>, vars: &[usize]) -> Result<T> {
    check_request(samples, vars)?;
    let rows: Vec<usize> = (0..samples.replicas).collect();
    Ok(plug_in(samples, &rows, vars))
}

/// Nonparametric bootstrap of `stat`; resample `b` uses its own seeded
/// stream, so the output does not depend on the execution mode.
pub fn bootstrap<T, F>(replicas: usize, opts: &BootstrapOptions, stat: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize]) -> T + Sync + Send,
{
    opts.exec.map_indexed(opts.resamples, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(b as u64);
        let rows: Vec<usize> = (0..replicas).map(|_| rng.random_range(0..replicas)).collect();
        stat(&rows)
    })
}

/// Plug-in joint cumulants with bootstrap standard errors, one per request.
///
/// Each request lists variable indices; repeats are allowed, so `[0, 0]`
/// asks for the variance of variable 0.
pub fn estimate_cumulants<T: SampleScalar>(
    samples: &Samples<T>,
    requests: &[Vec<usize>],
    opts: &BootstrapOptions,
) -> Result<Vec<Estimate<T>>> {
    let wrapped: Vec<Vec<Vec<usize>>> = requests.iter().map(|r| vec![r.clone()]).collect();
    estimate_cumulant_products(samples, &wrapped, opts)
}

/// Like [`estimate_cumulants`], but each request is a list of blocks and the
/// statistic is the product of the blocks' joint cumulants, so the bootstrap
/// sees the product and not its factors.
pub fn estimate_cumulant_products<T: SampleScalar>(
    samples: &Samples<T>,
    requests: &[Vec<Vec<usize>>],
    opts: &BootstrapOptions,
) -> Result<Vec<Estimate<T>>> {
    for blocks in requests {
        if blocks.is_empty() {
            return Err(Error::invalid("empty block list"));
        }
        for vars in blocks {
            check_request(samples, vars)?;
        }
    }
    if opts.resamples < 2 {
        return Err(Error::invalid("bootstrap needs at least 2 resamples"));
    }
    let product = |rows: &[usize], blocks: &Vec<Vec<usize>>| {
        blocks
            .iter()
            .fold(T::one(), |acc, vars| acc * plug_in(samples, rows, vars))
    };
    let all: Vec<usize> = (0..samples.replicas).collect();
    let boot = bootstrap(samples.replicas, opts, |rows| {
        requests.iter().map(|blocks| product(rows, blocks)).collect::<Vec<T>>()
    });
    let b = T::from_i64(boot.len() as i64);
    Ok(requests
        .iter()
        .enumerate()
        .map(|(q, blocks)| {
            let mean = boot.iter().fold(T::zero(), |acc, row| acc + row[q]) / b;
            let var = boot.iter().map(|row| (row[q] - mean).norm_sqr()).sum::<f64>()
                / (boot.len() - 1) as f64;
            Estimate {
                value: product(&all, blocks),
                std_error: var.sqrt(),
            }
        })
        .collect())
}
