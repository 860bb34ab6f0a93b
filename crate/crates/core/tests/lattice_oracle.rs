use depdisc::datagen::{random_relation, RandomSpec};
use depdisc::lattice::{search_local, FdTree};
use depdisc::model::{AttributeSet, DependencyKind};
use depdisc::oracle::{brute, OracleLimits};
use proptest::prelude::*;

fn spec_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (RandomSpec, u64)> {
    (0..=max_rows, 1..=max_cols, 1u32..6, 0.0f64..2.0, any::<u64>())
        .prop_map(|(n, m, d, skew, seed)| (RandomSpec::new(n, m, d).skew(skew), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn lattice_fds_match_oracle((spec, seed) in spec_strategy(40, 6)) {
        let r = random_relation(&spec, seed);
        let got = search_local(&r, DependencyKind::Fd).unwrap();
        prop_assert_eq!(got, brute(DependencyKind::Fd, &r, &OracleLimits::default()).unwrap());
    }

    #[test]
    fn lattice_uccs_match_oracle((spec, seed) in spec_strategy(40, 6)) {
        let r = random_relation(&spec, seed);
        let got = search_local(&r, DependencyKind::Ucc).unwrap();
        prop_assert_eq!(got, brute(DependencyKind::Ucc, &r, &OracleLimits::default()).unwrap());
    }

    #[test]
    fn lattice_ods_match_oracle((spec, seed) in spec_strategy(25, 5)) {
        let r = random_relation(&spec, seed);
        let got = search_local(&r, DependencyKind::Od).unwrap();
        prop_assert_eq!(got, brute(DependencyKind::Od, &r, &OracleLimits::default()).unwrap());
    }

    #[test]
    fn fdtree_never_stores_specializations(ops in prop::collection::vec((0u64..64, 0usize..6), 0..40)) {
        let mut t = FdTree::new(6);
        for (bits, rhs) in ops {
            let lhs = AttributeSet::from_bits(bits).without(rhs);
            t.insert(lhs, rhs);
        }
        let all = t.all();
        for (x, a) in &all {
            for (y, b) in &all {
                prop_assert!(!(a == b && x != y && x.is_subset_of(*y)));
            }
        }
    }
}
