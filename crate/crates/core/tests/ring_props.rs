mod common;

use proptest::prelude::*;

use superkoszul::ring::{RingSpec, TruncatedSeries, VarKind};

fn ring(n: usize, d: u32) -> RingSpec {
    RingSpec::new(n, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), n in 1usize..=2, d in 2u32..=6) {
        let mut rng = common::rng(seed);
        let r = ring(n, d);
        let a = common::series(&mut rng, r, 4, d);
        let b = common::series(&mut rng, r, 4, d);
        let c = common::series(&mut rng, r, 4, d);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn unit_inverse(seed in any::<u64>(), n in 1usize..=2, d in 2u32..=6) {
        let mut rng = common::rng(seed);
        let r = ring(n, d);
        let u = common::unit_series(&mut rng, r, 4, d);
        let inv = u.invert_unit().unwrap();
        let one = TruncatedSeries::one(r);
        prop_assert_eq!((&u * &inv).first_difference(&one), None);
        prop_assert!((&u * &inv).valid_order() >= d);
    }

    #[test]
    fn wirtinger_leibniz(seed in any::<u64>(), n in 1usize..=2, d in 2u32..=6, i in 1usize..=2, holo in any::<bool>()) {
        let mut rng = common::rng(seed);
        let r = ring(n, d);
        let i = i.min(n);
        let kind = if holo { VarKind::Z } else { VarKind::W };
        let a = common::series(&mut rng, r, 4, d);
        let b = common::series(&mut rng, r, 4, d);
        let lhs = (&a * &b).wirtinger(kind, i);
        let rhs = &(&a.wirtinger(kind, i) * &b) + &(&a * &b.wirtinger(kind, i));
        prop_assert_eq!(lhs.first_difference(&rhs), None);
    }

    #[test]
    fn print_parse_roundtrip(seed in any::<u64>(), n in 1usize..=3, d in 1u32..=6) {
        let mut rng = common::rng(seed);
        let r = ring(n, d);
        let a = common::series(&mut rng, r, 6, d);
        let back = TruncatedSeries::parse(&a.to_string(), r).unwrap();
        prop_assert_eq!(back.first_difference(&a), None);
        prop_assert_eq!(back.to_string(), a.to_string());
    }
}
