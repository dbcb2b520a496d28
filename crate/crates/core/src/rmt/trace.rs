use std::io::Write;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::ensemble::EnsembleSpec;
use super::sample::{eigenvalues, normalized_power_trace, replica_rng, sample_corner, sample_matrix, sum_independent, HermitianSample};
use crate::cumulants::{estimate_cumulants, BootstrapOptions, Estimate, Samples};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// A random-matrix model whose replicas are drawn independently.
#[derive(Clone, Debug)]
pub enum Sampler {
    Single(EnsembleSpec),
    /// `X_1 + X_2` with independent summands.
    Sum(EnsembleSpec, EnsembleSpec),
    /// Upper-left `m x m` corner.
    Corner(EnsembleSpec, usize),
}

impl Sampler {
    pub fn n(&self) -> usize {
        match self {
            Sampler::Single(s) | Sampler::Sum(s, _) => s.n(),
            Sampler::Corner(_, m) => *m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Sampler::Single(_) => Ok(()),
            Sampler::Sum(a, b) if a.n() != b.n() => Err(Error::GroundSetMismatch {
                left: a.n(),
                right: b.n(),
            }),
            Sampler::Sum(..) => Ok(()),
            Sampler::Corner(s, m) if *m == 0 || *m > s.n() => {
                Err(Error::invalid(format!("corner size {m} must lie in 1..={}", s.n())))
            }
            Sampler::Corner(..) => Ok(()),
        }
    }

    /// Draw for replica `replica` under master seed `seed`.
    pub fn replica(&self, seed: u64, replica: u64) -> Result<HermitianSample> {
        let mut rng = replica_rng(seed, replica);
        let mut x = match self {
            Sampler::Single(s) => sample_matrix(s, &mut rng),
            Sampler::Sum(a, b) => sum_independent(a, b, &mut rng)?,
            Sampler::Corner(s, m) => sample_corner(s, *m, &mut rng)?,
        };
        x.seed = Some(seed);
        x.replica = Some(replica);
        Ok(x)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Sampler::Single(s) => s.to_json(),
            Sampler::Sum(a, b) => json!({ "sum": [a.to_json(), b.to_json()] }),
            Sampler::Corner(s, m) => json!({ "corner": m, "of": s.to_json() }),
        }
    }

    pub fn hash(&self) -> String {
        match self {
            Sampler::Single(s) => s.hash(),
            _ => hex::encode(Sha256::digest(self.to_json().to_string().as_bytes())),
        }
    }

    /// Scale of the (first) ensemble, for reporting.
    pub fn scale(&self) -> f64 {
        match self {
            Sampler::Single(s) | Sampler::Sum(s, _) | Sampler::Corner(s, _) => s.scale().value(),
        }
    }
}

/// Normalized traces `tr X^p` per replica.
#[derive(Clone, Debug)]
pub struct TraceTable {
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub spec_hash: String,
    pub powers: Vec<usize>,
    /// `values[r][i] = tr X_r^{powers[i]}`.
    pub values: Vec<Vec<f64>>,
}

/// Samples `replicas` draws and records `tr X^p` for each requested power.
pub fn trace_statistics(
    sampler: &Sampler,
    powers: &[usize],
    replicas: usize,
    seed: u64,
    exec: Exec,
) -> Result<TraceTable> {
    if replicas < 2 {
        return Err(Error::invalid(format!("need at least 2 replicas, got {replicas}")));
    }
    if powers.is_empty() {
        return Err(Error::invalid("no powers requested"));
    }
    sampler.validate()?;
    let values = exec
        .map_indexed(replicas, |r| {
            let x = sampler.replica(seed, r as u64)?;
            let eigs = eigenvalues(&x)?;
            Ok(powers.iter().map(|&p| normalized_power_trace(&eigs, p)).collect())
        })
        .into_iter()
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(TraceTable {
        n: sampler.n(),
        eps: sampler.scale(),
        seed,
        spec_hash: sampler.hash(),
        powers: powers.to_vec(),
        values,
    })
}

impl TraceTable {
    pub fn replicas(&self) -> usize {
        self.values.len()
    }

    /// Column of `tr X^p` values, if `p` was recorded.
    pub fn column(&self, p: usize) -> Option<Vec<f64>> {
        let i = self.powers.iter().position(|&q| q == p)?;
        Some(self.values.iter().map(|row| row[i]).collect())
    }

    /// Mean of `tr X^p` over replicas.
    pub fn mean(&self, p: usize) -> Option<f64> {
        self.column(p).map(|c| c.iter().sum::<f64>() / c.len() as f64)
    }

    /// Joint cumulants of `n tr X^{p}` (i.e. `Tr X^p`) for each request of powers.
    pub fn cumulants(&self, requests: &[Vec<usize>], opts: &BootstrapOptions) -> Result<Vec<Estimate<f64>>> {
        let n = self.n as f64;
        let rows: Vec<Vec<f64>> = self.values.iter().map(|r| r.iter().map(|v| n * v).collect()).collect();
        let samples = Samples::from_rows(&rows)?;
        let idx = requests
            .iter()
            .map(|req| {
                req.iter()
                    .map(|p| {
                        self.powers
                            .iter()
                            .position(|q| q == p)
                            .ok_or_else(|| Error::invalid(format!("power {p} was not recorded")))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        estimate_cumulants(&samples, &idx, opts)
    }

    /// CSV with a metadata row, a `replica,p,value` header and one row per value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record([
            format!("# n={}", self.n),
            format!("eps={:e}", self.eps),
            format!("seed={}", self.seed),
            format!("spec={}", self.spec_hash),
        ])?;
        w.write_record(["replica", "p", "value"])?;
        for (r, row) in self.values.iter().enumerate() {
            for (p, v) in self.powers.iter().zip(row) {
                w.write_record([r.to_string(), p.to_string(), format!("{v:e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
