use num::{One, Signed, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::repunitary::ShiftedWeight;
use crate::scalar::{fmt_rational, int, to_f64, Rational};

/// Eigenvalues of one draw, as a multiset.
pub type Eigenvalues = Vec<Rational>;

/// Spectrum of `X = eps U diag(d) U*`: fixed, or drawn from a finite mixture.
#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Fixed(Eigenvalues),
    Mixture(Vec<(Eigenvalues, Rational)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scale {
    Exact(Rational),
    Float(f64),
}

impl Scale {
    pub fn value(&self) -> f64 {
        match self {
            Scale::Exact(r) => to_f64(r),
            Scale::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Result<&Rational> {
        match self {
            Scale::Exact(r) => Ok(r),
            Scale::Float(_) => Err(Error::invalid("exact computations need a rational scale")),
        }
    }
}

/// Unitarily invariant ensemble `X = eps U diag(d) U*` with `U` Haar.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    n: usize,
    spectrum: Spectrum,
    scale: Scale,
}

fn weight_values(l: &ShiftedWeight) -> Eigenvalues {
    l.entries().iter().map(|&x| int(x)).collect()
}

impl EnsembleSpec {
    pub fn new(n: usize, spectrum: Spectrum, scale: Scale) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        match &spectrum {
            Spectrum::Fixed(d) => {
                if d.len() != n {
                    return Err(Error::invalid(format!("spectrum has {} values, n = {n}", d.len())));
                }
            }
            Spectrum::Mixture(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::invalid("empty mixture"));
                }
                if atoms.iter().any(|(d, p)| d.len() != n || p.is_negative()) {
                    return Err(Error::invalid("mixture atoms need n values and nonnegative weights"));
                }
                let total: Rational = atoms.iter().map(|(_, p)| p).sum();
                if !total.is_one() {
                    return Err(Error::invalid(format!(
                        "mixture probabilities sum to {}",
                        fmt_rational(&total)
                    )));
                }
            }
        }
        if let Scale::Float(x) = scale {
            if !x.is_finite() {
                return Err(Error::invalid("scale must be finite"));
            }
        }
        Ok(EnsembleSpec { n, spectrum, scale })
    }

    /// `X(eps rho_l)` for an irreducible with shifted weight `l`.
    pub fn from_weight(l: &ShiftedWeight, scale: Scale) -> Self {
        EnsembleSpec::new(l.n(), Spectrum::Fixed(weight_values(l)), scale).expect("valid weight")
    }

    /// Mixture of shifted weights with probabilities summing to 1.
    pub fn from_weights(atoms: &[(ShiftedWeight, Rational)], scale: Scale) -> Result<Self> {
        let n = atoms.first().map(|(l, _)| l.n()).unwrap_or(0);
        EnsembleSpec::new(
            n,
            Spectrum::Mixture(atoms.iter().map(|(l, p)| (weight_values(l), p.clone())).collect()),
            scale,
        )
    }

    pub fn zero(n: usize) -> Self {
        EnsembleSpec::new(n, Spectrum::Fixed(vec![Rational::zero(); n]), Scale::Exact(int(1)))
            .expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    /// Mixture atoms, a fixed spectrum being one atom of weight 1.
    pub fn atoms(&self) -> Vec<(&Eigenvalues, Rational)> {
        match &self.spectrum {
            Spectrum::Fixed(d) => vec![(d, Rational::one())],
            Spectrum::Mixture(a) => a.iter().map(|(d, p)| (d, p.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let vals = |d: &Eigenvalues| d.iter().map(fmt_rational).collect::<Vec<_>>();
        let spectrum = match &self.spectrum {
            Spectrum::Fixed(d) => json!({ "fixed": vals(d) }),
            Spectrum::Mixture(a) => json!({
                "mixture": a.iter().map(|(d, p)| json!({ "values": vals(d), "p": fmt_rational(p) })).collect::<Vec<_>>()
            }),
        };
        let scale = match &self.scale {
            Scale::Exact(r) => json!(fmt_rational(r)),
            Scale::Float(x) => json!(x),
        };
        json!({ "n": self.n, "spectrum": spectrum, "scale": scale })
    }

    /// SHA-256 of the canonical JSON description, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().to_string().as_bytes()))
    }
}
