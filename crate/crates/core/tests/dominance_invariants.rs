use dominance_lab::domain::DomainSpec;
use dominance_lab::dominance::{decide, decide_finite, default_c_max, replay, replay_witness, DominanceKind, FilterParam, Verdict, Witness};
use dominance_lab::func::{make_function, parse_function, BodySpec, Mode, ResourceFunction, Value};
use dominance_lab::num::Q;
use dominance_lab::parse::parse_domain;
use dominance_lab::properties::gen::{trial_rng, Gen};
use proptest::prelude::*;

const HORIZON: u64 = 64;

fn grid(which: usize) -> DomainSpec {
    parse_domain(["N", "N+", "Z", "N^2"][which]).unwrap()
}

/// `f` and either an unrelated base function or one dominated by
/// construction under `kind`.
fn pair(seed: u64, domain: DomainSpec, kind: DominanceKind, related: bool) -> (ResourceFunction, ResourceFunction) {
    let mut gen = Gen::new(trial_rng(seed, 7, kind as usize, 0), domain);
    let f = gen.base_function();
    let g = if related { gen.dominated(kind, &f) } else { gen.base_function() };
    (g, f)
}

fn finite_table(vals: &[(u8, u8)]) -> (ResourceFunction, ResourceFunction) {
    let domain = DomainSpec::range(0, vals.len() as i64 - 1);
    let col = |pick: fn(&(u8, u8)) -> u8| {
        let rows = vals.iter().enumerate().map(|(i, v)| (vec![i as i64], Value::int(pick(v) as i64))).collect();
        make_function(domain.clone(), BodySpec::Table(rows), Mode::Exact).unwrap()
    };
    (col(|v| v.0), col(|v| v.1))
}

fn small() -> impl Strategy<Value = Vec<(u8, u8)>> {
    // zeros are common so that zero gaps show up
    prop::collection::vec((prop_oneof![Just(0u8), 0u8..20], prop_oneof![Just(0u8), 0u8..20]), 1..12)
}

fn kind() -> impl Strategy<Value = DominanceKind> {
    prop::sample::select(DominanceKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn holds_verdicts_replay_and_imply_weaker_kinds(seed in any::<u64>(), d in 0usize..4, k in kind(), related in any::<bool>()) {
        let (g, f) = pair(seed, grid(d), k, related);
        let c_max = default_c_max();
        let v = decide(k, &g, &f, HORIZON, &c_max).unwrap();
        prop_assert!(replay(k, &g, &f, &v).unwrap(), "{} under {}: {}", g, k, v);
        if v.holds() {
            for &w in k.weaker() {
                let vw = decide(w, &g, &f, HORIZON, &c_max).unwrap();
                prop_assert!(vw.holds(), "{} holds but {} gives {} for {} vs {}", k, w, vw, g, f);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn finite_linear_matches_the_direct_formula(vals in small()) {
        let (g, f) = finite_table(&vals);
        let zero_gap = vals.iter().any(|&(gv, fv)| fv == 0 && gv > 0);
        let v = decide_finite(DominanceKind::Linear, &g, &f).unwrap();
        prop_assert_eq!(v.holds(), !zero_gap);
        if let Verdict::Holds { witness, .. } = &v {
            let max_ratio = vals.iter().filter(|p| p.1 > 0).map(|&(gv, fv)| Q::new(gv as i64, fv as i64)).max().unwrap_or(Q::zero());
            prop_assert!(witness.c >= max_ratio);
            prop_assert!(replay_witness(DominanceKind::Linear, &g, &f, witness, 0).unwrap().is_none());
        }
    }

    #[test]
    fn finite_functions_are_bounded(vals in small()) {
        let (g, _) = finite_table(&vals);
        let one = ResourceFunction::tabulate(g.domain().clone(), Mode::Exact, |_| Ok(Value::int(1))).unwrap();
        prop_assert!(decide_finite(DominanceKind::Linear, &g, &one).unwrap().holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn transitivity_witnesses_compose(a in small(), b in small()) {
        let n = a.len().min(b.len());
        let vals: Vec<(u8, u8, u8)> = (0..n).map(|i| (a[i].0, a[i].1, b[i].0)).collect();
        let (g, f) = finite_table(&vals.iter().map(|v| (v.0, v.1)).collect::<Vec<_>>());
        let (_, h) = finite_table(&vals.iter().map(|v| (0, v.2)).collect::<Vec<_>>());
        for kind in [DominanceKind::Linear, DominanceKind::Affine] {
            let (Verdict::Holds { witness: w1, .. }, Verdict::Holds { witness: w2, .. }) =
                (decide_finite(kind, &g, &f).unwrap(), decide_finite(kind, &f, &h).unwrap()) else { continue };
            let c = if kind == DominanceKind::Linear {
                &w1.c * &w2.c
            } else {
                let m = w1.c.clone().max(w2.c.clone());
                &(&m * &m) + &m
            };
            let w = Witness { c, filter: FilterParam::Whole };
            prop_assert!(replay_witness(kind, &g, &h, &w, 0).unwrap().is_none(), "{} with {:?}", kind, w);
        }
    }

    #[test]
    fn bounded_on_naturals_iff_constant_witness(a in 1i64..40, b in 0i64..40, cap in 1i64..30, shape in 0usize..4) {
        let n = DomainSpec::naturals();
        let (body, bounded) = match shape {
            0 => (format!("{a}*min(n, {cap}) + {b}"), true),
            1 => (format!("{a}*n + {b}"), false),
            2 => (format!("{a}*ind(n >= {cap}) + {b}"), true),
            // sub-doubling growth such as sqrt(n) is indistinguishable from
            // bounded at a fixed horizon, so only clear shapes are used
            _ => (format!("{a}*pow(n, 2) + {b}"), false),
        };
        let g = parse_function(&n, &body).unwrap();
        let one = parse_function(&n, "1").unwrap();
        let v = decide(DominanceKind::Linear, &g, &one, 256, &default_c_max()).unwrap();
        prop_assert_eq!(v.holds(), bounded, "{}: {}", body, v);
    }
}
