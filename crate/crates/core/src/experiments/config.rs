use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by the experiments; unset fields take the per-experiment defaults.
///
/// Profiles: `eps_n = n^-a`, `lambda_i = round(c n^a (1 - i/n))` for
/// `i = 1..n`, second factor the one-row weight `(round(r n^a), 0, ..)` or,
/// when `c_second` is set, the same linear profile with that constant;
/// restriction to `U(m)` with `m = max(1, round(alpha n))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub n: Vec<usize>,
    pub a: f64,
    pub c: f64,
    pub r: f64,
    /// Linear-profile constant of the second factor, replacing the one-row weight.
    pub c_second: Option<f64>,
    pub alpha: f64,
    /// Explicit highest weight, overriding the profile (single `n`).
    pub lambda: Option<Vec<i64>>,
    /// Explicit second tensor factor.
    pub mu: Option<Vec<i64>>,
    pub orders: usize,
    pub replicas: usize,
    pub seed: u64,
    /// Extra sizes for matrix-only corner runs.
    pub corner_n: Vec<usize>,
    pub powers: Vec<usize>,
    pub bootstrap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            n: vec![2, 4, 6, 8],
            a: 1.5,
            c: 6.0,
            r: 0.5,
            c_second: None,
            alpha: 0.5,
            lambda: None,
            mu: None,
            orders: 4,
            replicas: 2000,
            seed: 0,
            corner_n: Vec::new(),
            powers: vec![1, 2, 3],
            bootstrap: 200,
        }
    }
}

impl ExperimentConfig {
    /// Defaults of the Kronecker product experiment.
    pub fn tensor() -> Self {
        ExperimentConfig {
            experiment: Some("tensor".into()),
            ..Default::default()
        }
    }

    /// Defaults of the restriction experiment; `c = 4` keeps about 1.3M
    /// branching components at `n = 8`.
    pub fn restrict() -> Self {
        ExperimentConfig {
            experiment: Some("restrict".into()),
            n: vec![4, 6, 8],
            c: 4.0,
            corner_n: vec![256],
            ..Default::default()
        }
    }

    /// Defaults of the fluctuation experiment: a sum of two independent
    /// matrices with the same linear profile, both macroscopic.
    pub fn simulate() -> Self {
        ExperimentConfig {
            experiment: Some("simulate".into()),
            n: vec![8, 16, 32],
            c: 3.0,
            c_second: Some(3.0),
            replicas: 10_000,
            ..Default::default()
        }
    }

    /// Defaults for a named experiment.
    pub fn defaults_for(name: &str) -> Self {
        match name {
            "restrict" => Self::restrict(),
            "simulate" => Self::simulate(),
            _ => Self::tensor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) {
            return Err(Error::invalid(format!(
                "eps_n = n^-a must be o(1/n), which requires a > 1 (got a = {})",
                self.a
            )));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::invalid("the n schedule must be nonempty and positive"));
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("the n schedule must be strictly increasing"));
        }
        let constants = [self.c, self.r, self.c_second.unwrap_or(0.0)];
        if !constants.iter().all(|x| *x >= 0.0 && x.is_finite()) {
            return Err(Error::invalid("profile constants must be finite and nonnegative"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.orders == 0 || self.orders > 8 {
            return Err(Error::invalid("orders must lie in 1..=8"));
        }
        if self.replicas < 2 {
            return Err(Error::invalid("need at least 2 replicas"));
        }
        if self.bootstrap < 2 {
            return Err(Error::invalid("need at least 2 bootstrap resamples"));
        }
        if let Some(l) = &self.lambda {
            if self.n.len() != 1 || self.n[0] != l.len() {
                return Err(Error::invalid("an explicit lambda needs the schedule [len(lambda)]"));
            }
        }
        if let Some(m) = &self.mu {
            if self.lambda.as_ref().map(Vec::len) != Some(m.len()) {
                return Err(Error::invalid("mu needs an explicit lambda of the same length"));
            }
        }
        Ok(())
    }

    /// `eps_n = n^-a`.
    pub fn eps(&self, n: usize) -> f64 {
        (n as f64).powf(-self.a)
    }

    /// Highest weight of the first factor at `n`.
    pub fn lambda_at(&self, n: usize) -> Vec<i64> {
        if let Some(l) = &self.lambda {
            return l.clone();
        }
        self.linear_profile(self.c, n)
    }

    fn linear_profile(&self, c: f64, n: usize) -> Vec<i64> {
        let scale = c * (n as f64).powf(self.a);
        (0..n)
            .map(|i| (scale * (1.0 - (i + 1) as f64 / n as f64)).round() as i64)
            .collect()
    }

    /// Highest weight of the second tensor factor at `n`.
    pub fn mu_at(&self, n: usize) -> Vec<i64> {
        if let Some(m) = &self.mu {
            return m.clone();
        }
        if let Some(c) = self.c_second {
            return self.linear_profile(c, n);
        }
        let mut row = vec![0; n];
        row[0] = (self.r * (n as f64).powf(self.a)).round() as i64;
        row
    }

    /// Subgroup rank `m_n = max(1, round(alpha n))`.
    pub fn m_at(&self, n: usize) -> usize {
        ((self.alpha * n as f64).round() as usize).clamp(1, n)
    }
}
