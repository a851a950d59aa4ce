use std::collections::BTreeMap;

use dominance_lab::domain::DomainSpec;
use dominance_lab::func::{make_function, parse_function, transform, BodySpec, Mode, Pointwise, TransformOp, Value};
use dominance_lab::num::Q;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (0i64..200, 1i64..50).prop_map(|(n, d)| Q::new(n, d))
}

/// Distinct 2-D points with a value each.
fn table() -> impl Strategy<Value = BTreeMap<(i64, i64), Q>> {
    prop::collection::btree_map((-6i64..20, -6i64..20), rational(), 0..40)
}

fn rows(t: &BTreeMap<(i64, i64), Q>) -> Vec<(Vec<i64>, Value)> {
    t.iter().map(|(&(a, b), v)| (vec![a, b], Value::Exact(v.clone()))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn table_round_trip(t in table()) {
        let rows = rows(&t);
        let domain = DomainSpec::finite_with_dim(2, rows.iter().map(|r| r.0.clone()).collect()).unwrap();
        let f = make_function(domain, BodySpec::Table(rows.clone()), Mode::Exact).unwrap();
        prop_assert_eq!(f.sample(0).unwrap(), rows);
    }

    #[test]
    fn restriction_filters_the_sample(t in table(), keep in prop::collection::vec(any::<bool>(), 40)) {
        let rows = rows(&t);
        let domain = DomainSpec::finite_with_dim(2, rows.iter().map(|r| r.0.clone()).collect()).unwrap();
        let f = make_function(domain, BodySpec::Table(rows.clone()), Mode::Exact).unwrap();
        let kept: Vec<_> = rows.iter().zip(&keep).filter(|(_, k)| **k).map(|(r, _)| r.clone()).collect();
        let sub = DomainSpec::finite_with_dim(2, kept.iter().map(|r| r.0.clone()).collect()).unwrap();
        let g = transform(&f, TransformOp::Restrict(sub)).unwrap();
        prop_assert_eq!(g.sample(0).unwrap(), kept);
    }

    #[test]
    fn integer_power_then_root_is_exact(vals in prop::collection::vec(rational(), 1..20), k in 1i64..5) {
        let rows: Vec<_> = vals.iter().enumerate().map(|(i, v)| (vec![i as i64], Value::Exact(v.clone()))).collect();
        let domain = DomainSpec::range(0, vals.len() as i64 - 1);
        let f = make_function(domain, BodySpec::Table(rows.clone()), Mode::Exact).unwrap();
        let up = transform(&f, TransformOp::Pointwise(Pointwise::Pow(Q::int(k)))).unwrap();
        let back = transform(&up, TransformOp::Pointwise(Pointwise::Pow(Q::new(1, k)))).unwrap();
        prop_assert_eq!(back.sample(0).unwrap(), rows);
    }

    #[test]
    fn fractional_power_round_trip_in_float_mode(vals in prop::collection::vec(rational(), 1..20), p in 1i64..7, q in 1i64..7) {
        let rows: Vec<_> = vals.iter().enumerate().map(|(i, v)| (vec![i as i64], Value::Float(v.to_f64()))).collect();
        let domain = DomainSpec::range(0, vals.len() as i64 - 1);
        let f = make_function(domain, BodySpec::Table(rows.clone()), Mode::float()).unwrap();
        let alpha = Q::new(p, q);
        let up = transform(&f, TransformOp::Pointwise(Pointwise::Pow(alpha.clone()))).unwrap();
        let back = transform(&up, TransformOp::Pointwise(Pointwise::Pow(alpha.recip()))).unwrap();
        for ((_, a), (_, b)) in back.sample(0).unwrap().iter().zip(&rows) {
            prop_assert!(a.eq_tol(b, Mode::float().rel_tol()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn logarithm_swap(x in (101i64..2000, 1i64..100), y in (101i64..2000, 1i64..100), b in (101i64..500, 1i64..100)) {
        let [x, y, b] = [x, y, b].map(|(n, d)| Q::new(n, d));
        prop_assume!(x > Q::one() && y > Q::one() && b > Q::one());
        let n = DomainSpec::naturals();
        let lhs = parse_function(&n, &format!("exp({x}, log({b}, {y}))")).unwrap().eval(&[0]).unwrap().to_f64();
        let rhs = parse_function(&n, &format!("exp({y}, log({b}, {x}))")).unwrap().eval(&[0]).unwrap().to_f64();
        prop_assert!((lhs - rhs).abs() / lhs < 1e-12, "{} vs {}", lhs, rhs);
    }
}
