use num::Zero;

use super::*;
use crate::combinat::{enumerate_pp, gamma_perm, scaling_exponent, PartitionedPermutation, Permutation, SetPartition};
use crate::cumulants::BootstrapOptions;
use crate::repunitary::ShiftedWeight;
use crate::rmt::{EnsembleSpec, Sampler, Scale};
use crate::scalar::{int, rat, to_f64, Rational};

fn weight(l: &[i64]) -> ShiftedWeight {
    ShiftedWeight::new(l.to_vec()).unwrap()
}

fn fixed(l: &[i64], eps: Rational) -> EnsembleSpec {
    EnsembleSpec::from_weight(&weight(l), Scale::Exact(eps))
}

fn two_atoms(a: &[i64], b: &[i64], p: Rational) -> EnsembleSpec {
    let q = int(1) - &p;
    EnsembleSpec::from_weights(&[(weight(a), p), (weight(b), q)], Scale::Exact(int(1))).unwrap()
}

fn perm(k: usize, cycles: &[&[usize]]) -> Permutation {
    Permutation::from_cycles(k, cycles).unwrap()
}

#[test]
fn first_order_kappa() {
    let spec = fixed(&[5, 3, 0], rat(1, 2));
    let t = kappa_exact(&spec, 1).unwrap();
    let vp = PartitionedPermutation::identity(1);
    assert_eq!(t.get(&vp), Some(&rat(8, 6)));
    assert_eq!(macro_from_micro(&t, &[1], 3).unwrap(), int(4));
}

#[test]
fn kappa_vanishes_off_the_poset() {
    let spec = two_atoms(&[3, 1, 0, -2], &[2, 1, 0, -1], rat(1, 4));
    let t = kappa_exact(&spec, 3).unwrap();
    let mut checked = 0;
    for v in SetPartition::all(3) {
        for pi in Permutation::all(3) {
            if !pi.refines(&v) {
                assert!(kappa_exact_pair(&spec, &v, &pi).unwrap().is_zero(), "{v} {pi}");
                assert!(t.value(&v, &pi).unwrap().is_zero());
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn conjugate_pairs_share_kappa() {
    let spec = fixed(&[4, 2, 1, 0], int(1));
    for k in 1..=3 {
        let t = kappa_exact(&spec, k).unwrap();
        assert!(t.conjugacy_violations().is_empty(), "k = {k}");
    }
    let t = kappa_exact(&spec, 2).unwrap();
    let a = PartitionedPermutation::full(Permutation::identity(2));
    let b = PartitionedPermutation::full(perm(2, &[&[0, 1]]));
    assert_ne!(t.get(&a), t.get(&b));
}

#[test]
fn regime_guards() {
    let spec = fixed(&[2, 1, 0], int(1));
    assert!(kappa_exact(&spec, 4).unwrap_err().is_guard());
    assert!(kappa_exact(&fixed(&[5, 4, 3, 2, 1], int(1)), 5).unwrap_err().is_guard());
    let float = EnsembleSpec::from_weight(&weight(&[2, 0]), Scale::Float(0.5));
    assert!(kappa_exact(&float, 1).is_err());
}

#[test]
fn macro_micro_worked_examples() {
    let l = [4i64, 1, 0];
    let spec = fixed(&l, rat(1, 3));
    let t2 = kappa_exact(&spec, 2).unwrap();
    let p2: i64 = l.iter().map(|x| x * x).sum();
    assert_eq!(macro_from_micro(&t2, &[2], 3).unwrap(), rat(p2, 9));
    assert_eq!(macro_from_micro(&t2, &[1, 1], 3).unwrap(), Rational::zero());
    assert!(macro_from_micro(&t2, &[3], 3).is_err());

    let mix = two_atoms(&[3, 1, 0, -1], &[5, 1, 0, -2], rat(1, 3));
    let t = kappa_exact(&mix, 2).unwrap();
    // k_1(Tr X^2) = E Tr X^2 over the two atoms
    let direct = rat(1, 3) * int(9 + 1 + 1) + rat(2, 3) * int(25 + 1 + 4);
    assert_eq!(macro_from_micro(&t, &[2], 4).unwrap(), direct);
    assert_eq!(trace_cumulant_exact(&mix, &[2]).unwrap(), direct);
}

#[test]
fn extended_table_agrees_where_both_exist() {
    let spec = two_atoms(&[3, 1, 0, -2], &[2, 1, 0, -1], rat(2, 5));
    for k in 1..=4 {
        assert_eq!(kappa_exact(&spec, k).unwrap(), kappa_extended(&spec, k).unwrap(), "k = {k}");
    }
}

#[test]
fn macro_micro_identity_is_exact() {
    let cases = [
        fixed(&[4, 2, 0], rat(1, 2)),
        two_atoms(&[2, 1, 0], &[5, 0, -1], rat(1, 3)),
        fixed(&[3, 2, 1, -1], int(1)),
        two_atoms(&[3, 1, 0, -2], &[1, 0, -1, -4], rat(3, 4)),
        two_atoms(&[6, 2, 1, 0, -1], &[2, 1, 0, -1, -2], rat(1, 2)),
    ];
    for spec in &cases {
        for check in verify_macro_micro(spec, 4, true).unwrap() {
            assert!(check.pass, "n = {} p = {:?}: {} vs {}", check.n, check.powers, check.lhs, check.rhs);
        }
    }
    let refused = verify_macro_micro(&cases[0], 4, false).unwrap_err();
    assert!(refused.is_guard());
}

#[test]
fn compositions_are_complete() {
    let c = compositions_up_to(4);
    assert_eq!(c.len(), 1 + 2 + 4 + 8);
    assert!(c.contains(&vec![1, 2, 1]));
}

#[test]
fn triangle_inequality_exhaustive() {
    for k in 1..=6usize {
        let pps: Vec<PartitionedPermutation> = enumerate_pp(k).unwrap().collect();
        let mut types = Vec::new();
        for g in Permutation::all(k) {
            let t = g.cycle_type();
            if !types.contains(&t) {
                types.push(t);
            }
        }
        for t in types {
            let gamma = gamma_perm(&t).unwrap();
            let top = PartitionedPermutation::full(gamma.clone());
            let one = SetPartition::coarsest(k);
            let cg = gamma.cycle_partition();
            // the inequality concerns the summation domain V v C(gamma) = 1_k
            for vp in pps.iter().filter(|vp| vp.partition().join(&cg).unwrap() == one) {
                let e = scaling_exponent(vp, &gamma).unwrap();
                assert!(e >= 0);
                assert_eq!(e == 0, vp.leq(&top).unwrap(), "{vp} gamma {gamma}");
            }
            if k == 2 && t == [1, 1] {
                let outside = PartitionedPermutation::identity(2);
                assert_eq!(scaling_exponent(&outside, &gamma).unwrap(), -2);
            }
        }
    }
}

#[test]
fn triangle_report_covers_every_cycle_type() {
    let rows = triangle_check(5).unwrap();
    // partitions of 1..=5
    assert_eq!(rows.len(), 1 + 2 + 3 + 5 + 7);
    assert!(rows.iter().all(|r| r.pass && r.min_exponent == 0 && r.equalities > 0));
    let k3: usize = rows.iter().filter(|r| r.k == 3).map(|r| r.domain).sum();
    assert!(k3 > 0);
    let table = exponent_table(&gamma_perm(&[2]).unwrap()).unwrap();
    assert_eq!(table.len(), 3);
    let mut values: Vec<i64> = table.iter().map(|x| x.1).collect();
    values.sort();
    assert_eq!(values, [0, 0, 2]);
}

#[test]
fn monte_carlo_kappa_matches_exact() {
    let spec = fixed(&[3, 1, 0, -2], int(1));
    let exact = kappa_exact(&spec, 2).unwrap();
    let targets: Vec<PartitionedPermutation> = enumerate_pp(2).unwrap().collect();
    let opts = BootstrapOptions {
        resamples: 100,
        seed: 5,
        ..Default::default()
    };
    let mc = kappa_mc(&Sampler::Single(spec), 2, &targets, 20_000, 41, &opts).unwrap();
    for vp in &targets {
        let e = to_f64(exact.get(vp).unwrap());
        let m = mc.get(vp).unwrap();
        let se = mc.std_error(vp).unwrap();
        assert!((m.re - e).abs() <= 3.0 * se, "{vp}: {m} +- {se} vs {e}");
        assert!(m.im.abs() <= 3.0 * se.max(1e-12), "{vp}: {m}");
    }
    let zero = kappa_mc(&Sampler::Single(EnsembleSpec::zero(3)), 2, &targets, 1000, 1, &opts).unwrap();
    assert!(zero.entries().all(|(_, v)| v.norm() == 0.0));
    assert!(kappa_mc(&Sampler::Single(EnsembleSpec::zero(3)), 2, &targets, 10, 1, &opts).is_err());
}

#[test]
fn limit_scan_first_order() {
    // eps_n = 1/n, l_i = n + 1 - i: kappa_(1, e) = (n + 1) / (2n)
    let spec_for = |n: usize| {
        let l: Vec<i64> = (1..=n as i64).rev().collect();
        Ok(EnsembleSpec::from_weight(&ShiftedWeight::new(l).unwrap(), Scale::Exact(rat(1, n as i64))))
    };
    let targets = LimitTargets {
        kappa: vec![PartitionedPermutation::identity(1)],
        moments: vec![vec![1, 1], vec![2, 1]],
    };
    let rec = limit_scan(&[4, 8, 16], spec_for, &targets, 1e-9).unwrap();
    let k = &rec.kappa[0].trend;
    assert_eq!(k.exact, vec!["5/8", "9/16", "17/32"]);
    assert!((k.richardson - 0.5).abs() < 1e-12);
    for m in &rec.moments {
        assert!(m.trend.values.iter().all(|&v| v == 0.0));
    }
    assert!(limit_scan(&[4, 8], spec_for, &targets, 0.1).is_err());
    assert!(limit_scan(&[8, 4, 16], spec_for, &targets, 0.1).is_err());
    let json = rec.to_json().unwrap();
    assert!(json.contains("richardson"));
}

#[test]
fn limit_scan_second_order_consistency() {
    // Tr X differs by 1 between the atoms, so Var(Tr X) = 1/4 at every n
    let spec_for = |n: usize| {
        let n = n as i64;
        let base: Vec<i64> = (1..=n).rev().collect();
        let mut bumped = base.clone();
        bumped[0] += n;
        let atoms = [(ShiftedWeight::new(base).unwrap(), rat(1, 2)), (ShiftedWeight::new(bumped).unwrap(), rat(1, 2))];
        EnsembleSpec::from_weights(&atoms, Scale::Exact(rat(1, n)))
    };
    let targets = LimitTargets {
        kappa: vec![PartitionedPermutation::full(Permutation::identity(2))],
        moments: vec![vec![1, 1], vec![2]],
    };
    let rec = limit_scan(&[4, 6, 8, 12], spec_for, &targets, 0.05).unwrap();
    let m11 = &rec.moments[0];
    assert!(m11.trend.values.iter().all(|&v| (v - 0.25).abs() < 1e-12));
    assert!(m11.consistent, "gap {}", m11.gap);
    assert!(rec.moments.iter().all(|m| m.consistent));
}

#[test]
fn casimir_matches_closed_form() {
    for l in [vec![0i64], vec![3], vec![2, 0], vec![5, 1, 0], vec![7, 4, 2, -1]] {
        let w = weight(&l);
        let n = l.len() as i64;
        let lambda: Vec<i64> = l.iter().enumerate().map(|(i, &x)| x - (n - 1 - i as i64)).collect();
        let closed: i64 = lambda.iter().enumerate().map(|(i, &x)| x * (x + n + 1 - 2 * (i as i64 + 1))).sum();
        assert_eq!(quadratic_casimir(&w), int(closed), "{l:?}");
    }
}

#[test]
fn commutators_decay_for_small_eps() {
    let profile = |n: usize| {
        let c = (n as f64).powf(1.5);
        let lambda: Vec<i64> = (0..n).map(|i| (c * (1.0 - i as f64 / n as f64)).round() as i64).collect();
        ShiftedWeight::from_highest(&lambda).unwrap()
    };
    let weights: Vec<ShiftedWeight> = [4, 8, 16, 32].into_iter().map(profile).collect();
    let report = commutator_decay_check(&weights, 1.5, &[2, 3]).unwrap();
    assert!(report.all_decay, "{report:#?}");
    assert!(report.rows.iter().any(|r| r.scaled.iter().any(|&v| v > 0.0)));

    let boundary = commutator_decay_check(&weights, 1.0, &[2]).unwrap_err();
    assert!(boundary.is_guard() && boundary.to_string().contains("boundary"));
    let unsupported = commutator_decay_check(&weights, 1.5, &[4]).unwrap_err();
    assert!(unsupported.to_string().contains("[2, 3]"));

    let trivial: Vec<ShiftedWeight> = [4, 8, 16].into_iter().map(|n| ShiftedWeight::from_highest(&vec![0; n]).unwrap()).collect();
    let zero = commutator_decay_check(&trivial, 1.5, &[2, 3]).unwrap();
    assert!(zero.rows.iter().all(|r| r.scaled.iter().all(|&v| v == 0.0)));
}
