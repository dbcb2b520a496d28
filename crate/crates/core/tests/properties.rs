use proptest::prelude::*;

use freerep::combinat::{Permutation, SetPartition};
use freerep::freeprob::{free_cumulants_to_moments, moments_to_free_cumulants, FreeCumulantSequence};
use freerep::repunitary::{convert_moments, spectral_moments, zelobenko_weights, Direction, ShiftedWeight, SpectralKind};
use freerep::scalar::{rat, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn weight() -> impl Strategy<Value = ShiftedWeight> {
    (-10i64..=10, prop::collection::vec(1i64..=5, 0..8)).prop_map(|(top, gaps)| {
        let mut l = vec![top];
        for g in gaps {
            l.push(l.last().unwrap() - g);
        }
        ShiftedWeight::new(l).unwrap()
    })
}

fn labels(k: usize) -> impl Strategy<Value = SetPartition> {
    prop::collection::vec(0usize..4, k).prop_map(|l| SetPartition::from_labels(&l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_cumulant_roundtrip(kappa in prop::collection::vec(rational(), 1..=7)) {
        let m = free_cumulants_to_moments(&FreeCumulantSequence(kappa.clone())).unwrap();
        prop_assert_eq!(moments_to_free_cumulants(&m).unwrap().0, kappa);
    }

    #[test]
    fn moment_conversion_roundtrip(l in weight(), order in 1usize..=5) {
        let naive = spectral_moments(&l, order, SpectralKind::Naive);
        let natural = convert_moments(Direction::NaiveToNatural, l.n(), &naive).unwrap();
        prop_assert_eq!(&natural, &spectral_moments(&l, order, SpectralKind::Natural));
        prop_assert_eq!(convert_moments(Direction::NaturalToNaive, l.n(), &natural).unwrap(), naive);
    }

    #[test]
    fn zelobenko_weights_are_a_probability(l in weight()) {
        let g = zelobenko_weights(&l);
        prop_assert_eq!(g.iter().sum::<Rational>(), rat(1, 1));
    }

    #[test]
    fn join_is_the_least_upper_bound(a in labels(6), b in labels(6), c in labels(6)) {
        let j = a.join(&b).unwrap();
        prop_assert_eq!(&j, &b.join(&a).unwrap());
        prop_assert!(a.leq(&j) && b.leq(&j));
        if a.leq(&c) && b.leq(&c) {
            prop_assert!(j.leq(&c));
        }
    }

    #[test]
    fn length_is_a_conjugacy_invariant(images in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
                                      conj in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = Permutation::from_images(images).unwrap();
        let s = Permutation::from_images(conj).unwrap();
        let q = p.conjugate_by(&s).unwrap();
        prop_assert_eq!(p.length(), q.length());
        prop_assert_eq!(p.cycle_type(), q.cycle_type());
        prop_assert_eq!(p.length() + p.num_cycles(), 6);
    }
}
