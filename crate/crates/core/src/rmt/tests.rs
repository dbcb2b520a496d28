use nalgebra::DMatrix;
use num::{One, Zero};

use super::*;
use crate::combinat::Permutation;
use crate::cumulants::BootstrapOptions;
use crate::exec::Exec;
use crate::freeprob::{atomic_moments, free_compress, free_convolve};
use crate::repunitary::ShiftedWeight;
use crate::scalar::{int, rat, rat_pow, to_f64, Complex64, Rational};

fn weight(l: &[i64]) -> ShiftedWeight {
    ShiftedWeight::new(l.to_vec()).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn haar_columns_are_orthonormal() {
    let mut rng = replica_rng(1, 0);
    for n in [1, 4, 9] {
        let u = haar_unitary(n, &mut rng);
        let err = &u.adjoint() * &u - CMatrix::identity(n, n);
        assert!(max_abs(&err) <= 1e-12, "n = {n}");
    }
    let v = haar_isometry(7, 3, &mut rng);
    assert!(max_abs(&(&v.adjoint() * &v - CMatrix::identity(3, 3))) <= 1e-12);
}

#[test]
fn haar_first_entry_moments() {
    let n = 4;
    let draws: Vec<Complex64> = (0..100_000u64)
        .map(|r| haar_unitary(n, &mut replica_rng(7, r))[(0, 0)])
        .collect();
    let abs2: Vec<f64> = draws.iter().map(|z| z.norm_sqr()).collect();
    let (m, se) = mean_and_se(&abs2);
    assert!((m - 0.25).abs() <= 3.0 * se, "E|U11|^2 = {m} +- {se}");
    for part in [draws.iter().map(|z| z.re).collect::<Vec<_>>(), draws.iter().map(|z| z.im).collect()] {
        let (m, se) = mean_and_se(&part);
        assert!(m.abs() <= 3.0 * se, "E U11 = {m} +- {se}");
    }
}

#[test]
fn samples_keep_the_prescribed_spectrum() {
    let l = weight(&[5, 2, 0, -3]);
    let spec = EnsembleSpec::from_weight(&l, Scale::Exact(rat(1, 2)));
    for r in 0..5 {
        let x = sample_replica(&spec, 3, r);
        assert_eq!((x.seed, x.replica), (Some(3), Some(r)));
        let h = &x.matrix - x.matrix.adjoint();
        assert!(max_abs(&h) <= 1e-12 * max_abs(&x.matrix));
        let eigs = eigenvalues(&x).unwrap();
        for (got, want) in eigs.iter().zip([-1.5, 0.0, 1.0, 2.5]) {
            assert!((got - want).abs() <= 1e-10, "{eigs:?}");
        }
        let tr2 = normalized_power_trace(&eigs, 2) * 4.0;
        assert!((tr2 - 0.25 * 38.0).abs() <= 1e-9);
    }
}

#[test]
fn mixture_frequencies_are_binomial() {
    let a = weight(&[1, 0]);
    let b = weight(&[4, 0]);
    let spec = EnsembleSpec::from_weights(&[(a, rat(1, 2)), (b, rat(1, 2))], Scale::Exact(int(1))).unwrap();
    let reps = 4000;
    let mut hits = 0;
    for r in 0..reps {
        let top = *eigenvalues(&sample_replica(&spec, 11, r)).unwrap().last().unwrap();
        if (top - 1.0).abs() < 1e-10 {
            hits += 1;
        } else {
            assert!((top - 4.0).abs() < 1e-10);
        }
    }
    let sigma = (reps as f64 * 0.25).sqrt();
    assert!((hits as f64 - reps as f64 / 2.0).abs() <= 3.0 * sigma, "{hits}");
}

#[test]
fn mixture_probabilities_must_sum_to_one() {
    let a = weight(&[1, 0]);
    assert!(EnsembleSpec::from_weights(&[(a, rat(1, 3))], Scale::Exact(int(1))).is_err());
}

#[test]
fn sums_and_corners() {
    let b = EnsembleSpec::from_weight(&weight(&[3, 1, 0]), Scale::Exact(int(1)));
    let zero = EnsembleSpec::zero(3);
    let mut rng = replica_rng(5, 0);
    let x = sum_independent(&zero, &b, &mut rng).unwrap();
    let eigs = eigenvalues(&x).unwrap();
    assert!(eigs.iter().zip([0.0, 1.0, 3.0]).all(|(g, w)| (g - w).abs() < 1e-10));

    let a = EnsembleSpec::from_weight(&weight(&[2, 0, -5]), Scale::Exact(int(1)));
    let y = sum_independent(&a, &b, &mut rng).unwrap();
    let tr: f64 = (0..3).map(|i| y.matrix[(i, i)].re).sum();
    assert!((tr - 1.0).abs() < 1e-12);
    assert!(sum_independent(&a, &EnsembleSpec::zero(4), &mut rng).is_err());

    assert_eq!(corner(&y, 3).unwrap().matrix, y.matrix);
    let c = corner(&y, 2).unwrap();
    assert_eq!(c.n(), 2);
    assert!(max_abs(&(&c.matrix - c.matrix.adjoint())) == 0.0);
    assert!(corner(&y, 0).is_err() && corner(&y, 4).is_err());
}

#[test]
fn eigenvalue_examples() {
    let d = HermitianSample::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(3.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(2.0, 0.0),
    ])));
    assert_eq!(eigenvalues(&d).unwrap(), vec![-1.0, 2.0, 3.0]);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let swap = HermitianSample::new(DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]));
    let e = eigenvalues(&swap).unwrap();
    assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
}

#[test]
fn eigenpair_residuals() {
    let spec = EnsembleSpec::from_weight(&weight(&[9, 4, 3, 1, 0, -2]), Scale::Float(0.3));
    let x = sample_replica(&spec, 2, 0);
    let (vals, vecs) = eigen_decomposition(&x).unwrap();
    let norm = x.matrix.norm();
    for (j, &lambda) in vals.iter().enumerate() {
        let v = vecs.column(j);
        let r = &x.matrix * v - v * Complex64::new(lambda, 0.0);
        assert!(r.norm() <= 1e-10 * norm);
    }
}

#[test]
fn sum_moments_follow_free_convolution() {
    let n = 256i64;
    let signs: Vec<Rational> = (0..n).map(|i| if i % 2 == 0 { int(1) } else { int(-1) }).collect();
    let ramp: Vec<Rational> = (0..n).map(|i| rat(2 * i - n + 1, n - 1)).collect();
    let a = EnsembleSpec::new(256, Spectrum::Fixed(signs.clone()), Scale::Exact(int(1))).unwrap();
    let b = EnsembleSpec::new(256, Spectrum::Fixed(ramp.clone()), Scale::Exact(int(1))).unwrap();
    let atoms = |d: &[Rational]| d.iter().map(|x| (x.clone(), rat(1, n))).collect::<Vec<_>>();
    let target = free_convolve(&atomic_moments(&atoms(&signs), 4), &atomic_moments(&atoms(&ramp), 4), 4).unwrap();
    let table = trace_statistics(&Sampler::Sum(a, b), &[2, 4], 48, 21, Exec::default()).unwrap();
    for p in [2, 4] {
        let (m, se) = mean_and_se(&table.column(p).unwrap());
        let t = to_f64(&target.get(p));
        assert!((m - t).abs() <= 3.0 * se.max(1e-12), "m{p}: {m} +- {se} vs {t}");
    }
}

#[test]
fn corner_moments_follow_free_compression() {
    let n = 256i64;
    let signs: Vec<Rational> = (0..n).map(|i| if i % 2 == 0 { int(1) } else { int(-1) }).collect();
    let spec = EnsembleSpec::new(256, Spectrum::Fixed(signs), Scale::Exact(int(1))).unwrap();
    let full = atomic_moments(&[(int(1), rat(1, 2)), (int(-1), rat(1, 2))], 4);
    let target = free_compress(&full, &rat(1, 2), 4).unwrap();
    let table = trace_statistics(&Sampler::Corner(spec.clone(), 128), &[2, 4], 48, 4, Exec::default()).unwrap();
    for p in [2, 4] {
        let (m, se) = mean_and_se(&table.column(p).unwrap());
        let t = to_f64(&target.get(p));
        assert!((m - t).abs() <= 3.0 * se, "m{p}: {m} +- {se} vs {t}");
    }
    // the direct isometry sampler agrees in law with cutting a full draw
    let cut: Vec<f64> = (0..48)
        .map(|r| {
            let c = corner(&sample_replica(&spec, 9, r), 128).unwrap();
            normalized_power_trace(&eigenvalues(&c).unwrap(), 2)
        })
        .collect();
    let (m, se) = mean_and_se(&cut);
    assert!((m - to_f64(&target.get(2))).abs() <= 3.0 * se);
}

#[test]
fn fixed_spectrum_traces_do_not_fluctuate() {
    let spec = EnsembleSpec::from_weight(&weight(&[4, 2, 1, 0]), Scale::Exact(rat(1, 3)));
    let table = trace_statistics(&Sampler::Single(spec), &[1, 2, 3], 50, 8, Exec::default()).unwrap();
    for p in [1, 2, 3] {
        let col = table.column(p).unwrap();
        assert!(col.iter().all(|v| (v - col[0]).abs() < 1e-12));
    }
    let opts = BootstrapOptions {
        resamples: 20,
        ..Default::default()
    };
    let var = table.cumulants(&[vec![2, 2]], &opts).unwrap();
    assert!(var[0].value.abs() < 1e-20, "{:?}", var[0]);
}

#[test]
fn trace_tables_are_schedule_independent_and_csv() {
    let a = EnsembleSpec::from_weight(&weight(&[2, 0]), Scale::Exact(int(1)));
    let mix = EnsembleSpec::from_weights(&[(weight(&[2, 0]), rat(1, 4)), (weight(&[3, -1]), rat(3, 4))], Scale::Float(0.5)).unwrap();
    let s = Sampler::Sum(a, mix);
    let seq = trace_statistics(&s, &[1, 2], 30, 3, Exec::Sequential).unwrap();
    let par = trace_statistics(&s, &[1, 2], 30, 3, Exec::Parallel).unwrap();
    assert_eq!(seq.values, par.values);
    let mut buf = Vec::new();
    seq.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# n=2,eps=1e0,seed=3,spec="), "{meta}");
    assert_eq!(lines.next(), Some("replica,p,value"));
    assert_eq!(lines.count(), 60);
}

#[test]
fn trace_fluctuations_shrink_and_become_gaussian() {
    // a two-atom mixture so that Tr X^2 is random
    let opts = BootstrapOptions {
        resamples: 100,
        ..Default::default()
    };
    let mut vars = Vec::new();
    let mut thirds = Vec::new();
    for n in [8usize, 16, 32] {
        let half = n as i64 / 2;
        let a: Vec<Rational> = (0..n as i64).map(|i| if i < half { int(1) } else { int(-1) }).collect();
        let b: Vec<Rational> = (0..n as i64).map(|i| rat(i, n as i64)).collect();
        let spec_a = EnsembleSpec::new(n, Spectrum::Fixed(a), Scale::Exact(int(1))).unwrap();
        let spec_b = EnsembleSpec::new(n, Spectrum::Fixed(b), Scale::Exact(int(1))).unwrap();
        let table = trace_statistics(&Sampler::Sum(spec_a, spec_b), &[2], 3000, 17, Exec::default()).unwrap();
        let est = table.cumulants(&[vec![2, 2], vec![2, 2, 2]], &opts).unwrap();
        // the estimates are for Tr = n tr
        let nf = n as f64;
        vars.push((est[0].value / (nf * nf), est[0].std_error / (nf * nf)));
        thirds.push(est[1]);
    }
    for w in vars.windows(2) {
        let ratio = w[0].0 / w[1].0;
        let se = ratio * ((w[0].1 / w[0].0).powi(2) + (w[1].1 / w[1].0).powi(2)).sqrt();
        assert!((ratio - 4.0).abs() <= 3.0 * se, "ratio {ratio} +- {se}");
    }
    let last = thirds.last().unwrap();
    assert!(last.value.abs() <= 3.0 * last.std_error, "{last:?}");
    assert!(thirds[2].value.abs() <= thirds[0].value.abs() + 3.0 * thirds[0].std_error);
}

#[test]
fn unitary_conjugation_preserves_spectral_statistics() {
    let spec = EnsembleSpec::from_weight(&weight(&[3, 1, 0]), Scale::Exact(int(1)));
    let w = haar_unitary(3, &mut replica_rng(99, 0));
    for r in 0..10 {
        let x = sample_replica(&spec, 1, r);
        let y = HermitianSample::new(&w * &x.matrix * w.adjoint());
        let (ex, ey) = (eigenvalues(&x).unwrap(), eigenvalues(&y).unwrap());
        assert!(ex.iter().zip(&ey).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn weingarten_small_orders() {
    for n in 1..6 {
        let w = weingarten_table(1, n).unwrap();
        assert_eq!(w.class_value(&[1]), Some(&rat(1, n as i64)));
    }
    for n in 2..7i64 {
        let w = weingarten_table(2, n as usize).unwrap();
        assert_eq!(w.class_value(&[1, 1]), Some(&rat(1, n * n - 1)));
        assert_eq!(w.class_value(&[2]), Some(&rat(-1, n * (n * n - 1))));
    }
}

#[test]
fn weingarten_gram_identity() {
    for k in 1..=4 {
        for n in 4..=6 {
            let w = weingarten_table(k, n).unwrap();
            for (s, v) in w.gram_residuals() {
                let want = if s.is_identity() { Rational::one() } else { Rational::zero() };
                assert_eq!(v, want, "k={k} n={n} sigma={s}");
            }
        }
    }
}

#[test]
fn weingarten_refuses_singular_gram() {
    let err = weingarten_table(4, 3).unwrap_err();
    assert!(err.is_guard());
    assert!(weingarten_table(6, 6).unwrap_err().is_guard());
}

#[test]
fn pseudo_inverse_matches_and_extends() {
    for k in 1..=4 {
        for n in k..=k + 2 {
            assert_eq!(weingarten_pseudo(k, n).unwrap().classes().collect::<Vec<_>>(),
                weingarten_table(k, n).unwrap().classes().collect::<Vec<_>>());
        }
    }
    // G Wg G = G on S_k for n < k, with G(sigma) = n^{#sigma}
    for (k, n) in [(3, 2), (4, 2), (4, 3)] {
        let w = weingarten_pseudo(k, n).unwrap();
        let perms = Permutation::all(k);
        let g = |p: &Permutation| rat_pow(&int(n as i64), p.num_cycles() as i64);
        for s in &perms {
            let mut total = Rational::zero();
            for a in &perms {
                for b in &perms {
                    // s = a * x * b  =>  x = a^-1 s b^-1
                    let x = a.inverse().compose(s).unwrap().compose(&b.inverse()).unwrap();
                    total += g(a) * w.value(&x) * g(b);
                }
            }
            assert_eq!(total, g(s), "k={k} n={n} sigma={s}");
        }
    }
}

#[test]
fn entry_moments_closed_forms() {
    let l = [4i64, 2, 1, 0];
    let spec = EnsembleSpec::from_weight(&weight(&l), Scale::Exact(rat(1, 3)));
    let p1: i64 = l.iter().sum();
    let p2: i64 = l.iter().map(|x| x * x).sum();
    assert_eq!(exact_entry_moment(&spec, &[(0, 0)]).unwrap(), rat(p1, 12));
    assert_eq!(exact_entry_moment(&spec, &[(0, 1)]).unwrap(), Rational::zero());
    // E X_11^2 = (p1^2 + p2) / (n (n + 1)) from E|U_11|^4 = 2/(n(n+1)), E|U_11 U_12|^2 = 1/(n(n+1))
    assert_eq!(exact_entry_moment(&spec, &[(0, 0), (0, 0)]).unwrap(), rat(p1 * p1 + p2, 20) / int(9));
    // E |X_12|^2 = (n p2 - p1^2) / (n (n^2 - 1))
    assert_eq!(
        exact_entry_moment(&spec, &[(0, 1), (1, 0)]).unwrap(),
        rat(4 * p2 - p1 * p1, 60) / int(9)
    );
    assert!(exact_entry_moment(&spec, &[(0, 4)]).is_err());
    let float = EnsembleSpec::from_weight(&weight(&l), Scale::Float(0.1));
    assert!(exact_entry_moment(&float, &[(0, 0)]).is_err());
}

#[test]
fn entry_moments_match_monte_carlo() {
    let spec = EnsembleSpec::from_weights(
        &[(weight(&[3, 1, 0, -1]), rat(1, 3)), (weight(&[2, 1, 0, -2]), rat(2, 3))],
        Scale::Exact(int(1)),
    )
    .unwrap();
    let cases: Vec<Vec<(usize, usize)>> = vec![
        vec![(0, 0)],
        vec![(0, 0), (1, 1)],
        vec![(0, 1), (1, 0)],
        vec![(0, 1), (1, 2), (2, 0)],
        vec![(0, 0), (0, 0), (1, 1)],
    ];
    let reps = 100_000;
    let draws: Vec<CMatrix> = Exec::default().map_indexed(reps, |r| sample_replica(&spec, 23, r as u64).matrix);
    for case in cases {
        let exact = to_f64(&exact_entry_moment(&spec, &case).unwrap());
        let vals: Vec<f64> = draws
            .iter()
            .map(|x| case.iter().fold(Complex64::new(1.0, 0.0), |acc, &(i, j)| acc * x[(i, j)]).re)
            .collect();
        let (m, se) = mean_and_se(&vals);
        assert!((m - exact).abs() <= 3.0 * se, "{case:?}: {m} +- {se} vs {exact}");
    }
}

#[test]
fn spec_hash_is_stable() {
    let a = EnsembleSpec::from_weight(&weight(&[2, 0]), Scale::Exact(rat(1, 2)));
    let b = EnsembleSpec::from_weight(&weight(&[2, 0]), Scale::Exact(rat(2, 4)));
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    assert_ne!(a.hash(), EnsembleSpec::from_weight(&weight(&[3, 0]), Scale::Exact(rat(1, 2))).hash());
}
