use dominance_lab::error::Error;
use dominance_lab::num::Q;
use dominance_lab::omap::{check_o_equality, check_o_mapping, OStatus, OTransform};
use dominance_lab::properties::InstanceGen;
use proptest::prelude::*;

fn gen(seed: u64) -> InstanceGen {
    InstanceGen { seed, trials: 20, ..InstanceGen::default() }
}

fn alpha() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=6).prop_map(|(n, d)| Q::new(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn translation_never_satisfies_equality(a in alpha(), seed in any::<u64>()) {
        // either some T̂(g) goes negative, or the law breaks on a g that
        // stays above α
        match check_o_equality(&OTransform::Translate(a.clone()), &OTransform::untranslate(a), &gen(seed)) {
            Err(e) => prop_assert!(matches!(e, Error::RightInverseViolated(_)), "{:?}", e),
            Ok(r) => prop_assert!(matches!(r.status, OStatus::LawFailed { .. }), "{:?}", r.status),
        }
    }

    #[test]
    fn equality_implies_mapping(a in alpha(), power in any::<bool>(), seed in any::<u64>()) {
        let (t, t_hat) = if power {
            (OTransform::PowerBy(a.clone()), OTransform::PowerBy(a.recip()))
        } else {
            (OTransform::ScaleBy(a.clone()), OTransform::ScaleBy(a.recip()))
        };
        let eq = check_o_equality(&t, &t_hat, &gen(seed)).unwrap();
        prop_assert!(eq.passed(), "{:?}", eq.status);
        let map = check_o_mapping(&t, &gen(seed)).unwrap();
        prop_assert!(map.passed(), "{:?}", map.status);
    }

    #[test]
    fn translation_is_a_mapping(a in alpha(), seed in any::<u64>()) {
        prop_assert!(check_o_mapping(&OTransform::Translate(a), &gen(seed)).unwrap().passed());
    }
}
