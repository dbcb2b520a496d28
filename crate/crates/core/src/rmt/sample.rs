use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ensemble::{EnsembleSpec, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Complex64};

pub type CMatrix = DMatrix<Complex64>;

/// Generator for replica `replica` of a run with master seed `seed`: one
/// ChaCha stream per replica, so results do not depend on scheduling.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`), Haar
/// distributed: QR of a complex Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows && cols > 0, "need 0 < cols <= rows");
    let qr = ginibre(rows, cols, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    haar_isometry(n, n, rng)
}

/// A Hermitian matrix with the seed and replica it was drawn from.
#[derive(Clone, Debug)]
pub struct HermitianSample {
    pub matrix: CMatrix,
    pub seed: Option<u64>,
    pub replica: Option<u64>,
}

impl HermitianSample {
    /// Wraps `m`, replacing it by `(m + m*) / 2`.
    pub fn new(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianSample {
            matrix: h,
            seed: None,
            replica: None,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    fn tagged(mut self, seed: u64, replica: u64) -> Self {
        self.seed = Some(seed);
        self.replica = Some(replica);
        self
    }
}

fn draw_spectrum<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Vec<f64> {
    let eps = spec.scale().value();
    let pick = match spec.spectrum() {
        Spectrum::Fixed(d) => d,
        Spectrum::Mixture(atoms) => {
            // inverse CDF on the float probabilities, in declared order
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = &atoms[atoms.len() - 1].0;
            for (d, p) in atoms {
                acc += to_f64(p);
                if u < acc {
                    chosen = d;
                    break;
                }
            }
            chosen
        }
    };
    pick.iter().map(|x| eps * to_f64(x)).collect()
}

fn conjugate_diag(v: &CMatrix, d: &[f64]) -> CMatrix {
    // v* diag(d) v for v with rows indexed by the spectrum
    let mut scaled = v.clone();
    for (i, &x) in d.iter().enumerate() {
        for j in 0..v.ncols() {
            scaled[(i, j)] *= x;
        }
    }
    v.adjoint() * scaled
}

/// One draw of `eps U diag(d) U*`.
pub fn sample_matrix<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> HermitianSample {
    let d = draw_spectrum(spec, rng);
    let u = haar_unitary(spec.n(), rng);
    HermitianSample::new(conjugate_diag(&u.adjoint(), &d))
}

/// Replica `replica` of [`sample_matrix`] under master seed `seed`.
pub fn sample_replica(spec: &EnsembleSpec, seed: u64, replica: u64) -> HermitianSample {
    sample_matrix(spec, &mut replica_rng(seed, replica)).tagged(seed, replica)
}

/// `X_1 + X_2` with independent draws.
pub fn sum_independent<R: Rng + ?Sized>(
    a: &EnsembleSpec,
    b: &EnsembleSpec,
    rng: &mut R,
) -> Result<HermitianSample> {
    if a.n() != b.n() {
        return Err(Error::GroundSetMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let x = sample_matrix(a, rng);
    let y = sample_matrix(b, rng);
    Ok(HermitianSample::new(x.matrix + y.matrix))
}

/// Leading principal `m x m` block.
pub fn corner(x: &HermitianSample, m: usize) -> Result<HermitianSample> {
    if m == 0 || m > x.n() {
        return Err(Error::invalid(format!("corner size {m} must lie in 1..={}", x.n())));
    }
    let mut out = HermitianSample::new(x.matrix.view((0, 0), (m, m)).into_owned());
    out.seed = x.seed;
    out.replica = x.replica;
    Ok(out)
}

/// The `m x m` corner of a fresh draw of `spec`, sampled directly as
/// `V* diag(eps d) V` with `V` a Haar `n x m` isometry.
pub fn sample_corner<R: Rng + ?Sized>(spec: &EnsembleSpec, m: usize, rng: &mut R) -> Result<HermitianSample> {
    if m == 0 || m > spec.n() {
        return Err(Error::invalid(format!("corner size {m} must lie in 1..={}", spec.n())));
    }
    let d = draw_spectrum(spec, rng);
    let v = haar_isometry(spec.n(), m, rng);
    Ok(HermitianSample::new(conjugate_diag(&v, &d)))
}

/// Maximum sweeps of the implicit QL/QR iteration before giving up.
const MAX_EIGEN_ITERATIONS: usize = 10_000;

/// Eigenvalues in increasing order.
pub fn eigenvalues(x: &HermitianSample) -> Result<Vec<f64>> {
    let n = x.n();
    if n == 1 {
        return Ok(vec![x.matrix[(0, 0)].re]);
    }
    let eig = SymmetricEigen::try_new(x.matrix.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or_else(|| {
            let norm = x.matrix.norm();
            Error::Convergence(format!(
                "no convergence after {MAX_EIGEN_ITERATIONS} iterations (n = {n}, Frobenius norm {norm:.3e})"
            ))
        })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenpairs, for residual checks.
pub fn eigen_decomposition(x: &HermitianSample) -> Result<(DVector<f64>, CMatrix)> {
    let eig = SymmetricEigen::try_new(x.matrix.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or_else(|| Error::Convergence(format!("no convergence (n = {})", x.n())))?;
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// `tr X^p = (1/n) sum_i lambda_i^p`.
pub fn normalized_power_trace(eigs: &[f64], p: usize) -> f64 {
    eigs.iter().map(|x| x.powi(p as i32)).sum::<f64>() / eigs.len() as f64
}
