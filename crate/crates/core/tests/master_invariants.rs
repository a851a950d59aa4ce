use dominance_lab::func::Value;
use dominance_lab::master::{eval_master, MasterParams, Method, Variant};
use dominance_lab::num::Q;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = MasterParams> {
    (1i64..=5, prop::sample::select(vec![Q::int(2), Q::new(5, 2), Q::int(3), Q::int(4)]), 0i64..=2, 1i64..=3)
        .prop_map(|(a, b, c, d)| MasterParams::monomial(Q::int(a), b, Q::int(c), Q::int(d), Q::int(1)).unwrap())
}

fn exact(v: Value) -> Q {
    match v {
        Value::Exact(q) => q,
        other => panic!("expected an exact value, got {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn methods_agree_exactly(p in params(), k in 0i64..=12, n in 1i64..=4096) {
        let x = p.b.powi(k);
        let r = exact(eval_master(Variant::Powers, &p, &x, Method::Recursive).unwrap());
        prop_assert_eq!(r, exact(eval_master(Variant::Powers, &p, &x, Method::Closed).unwrap()));
        if p.b >= Q::int(2) {
            let n = Q::int(n);
            let r = exact(eval_master(Variant::Integers, &p, &n, Method::Recursive).unwrap());
            prop_assert_eq!(r, exact(eval_master(Variant::Integers, &p, &n, Method::Closed).unwrap()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reals_restricted_to_powers_bracket_the_powers_variant(p in params()) {
        let (mut lo, mut hi) = (f64::INFINITY, 0f64);
        for k in 0..=10 {
            let x = p.b.powi(k);
            let t = eval_master(Variant::Reals, &p, &x, Method::Closed).unwrap().to_f64();
            let big_t = eval_master(Variant::Powers, &p, &x, Method::Closed).unwrap().to_f64();
            lo = lo.min(t / big_t);
            hi = hi.max(t / big_t);
        }
        prop_assert!(hi / lo < 10.0, "{} .. {}", lo, hi);
    }

    #[test]
    fn integers_bracket_the_reals_variant(p in params()) {
        prop_assume!(p.b >= Q::int(2));
        let (mut lo, mut hi) = (f64::INFINITY, 0f64);
        for n in 1..=2048 {
            let x = Q::int(n);
            let t_int = eval_master(Variant::Integers, &p, &x, Method::Closed).unwrap().to_f64();
            let t = eval_master(Variant::Reals, &p, &x, Method::Closed).unwrap().to_f64();
            lo = lo.min(t_int / t);
            hi = hi.max(t_int / t);
        }
        prop_assert!(lo > 0.0 && hi / lo < 10.0, "{} .. {}", lo, hi);
    }
}
