use dominance_lab::domain::DomainSpec;
use dominance_lab::dominance::{decide_finite, DominanceKind, FilterParam, Verdict};
use dominance_lab::func::{make_function, BodySpec, Mode, ResourceFunction, Value};
use dominance_lab::num::Q;
use dominance_lab::properties::{check_property, run_trial, CellStatus, InstanceGen, PropertyId, TrialOutcome};
use proptest::prelude::*;

fn gen(seed: u64, trials: usize) -> InstanceGen {
    InstanceGen { seed, trials, ..InstanceGen::default() }
}

fn table(vals: &[Q]) -> ResourceFunction {
    let domain = DomainSpec::range(0, vals.len() as i64 - 1);
    let rows = vals.iter().enumerate().map(|(i, v)| (vec![i as i64], Value::Exact(v.clone()))).collect();
    make_function(domain, BodySpec::Table(rows), Mode::Exact).unwrap()
}

fn rational() -> impl Strategy<Value = Q> {
    prop_oneof![Just(Q::zero()), (1i64..40, 1i64..8).prop_map(|(n, d)| Q::new(n, d))]
}

fn holds(g: &ResourceFunction, f: &ResourceFunction) -> bool {
    decide_finite(DominanceKind::Linear, g, f).unwrap().holds()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn same_seed_same_cell(seed in any::<u64>(), p in prop::sample::select(vec![PropertyId::Order, PropertyId::Zero, PropertyId::One, PropertyId::Scale])) {
        for kind in [DominanceKind::Linear, DominanceKind::Asymptotic, DominanceKind::Trivial] {
            let a = check_property(p, kind, &gen(seed, 6)).unwrap();
            let b = check_property(p, kind, &gen(seed, 6)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn failed_cells_replay(seed in any::<u64>(), cell in prop::sample::select(vec![
        (PropertyId::Zero, DominanceKind::Trivial),
        (PropertyId::One, DominanceKind::Trivial),
        (PropertyId::SubHom, DominanceKind::Affine),
        (PropertyId::SuperHom, DominanceKind::Asymptotic),
        (PropertyId::SubComp, DominanceKind::Cofinite),
        (PropertyId::TrivialZero, DominanceKind::Asymptotic),
    ])) {
        let g = gen(seed, 20);
        let c = check_property(cell.0, cell.1, &g).unwrap();
        match &c.status {
            CellStatus::Failed { instance, .. } => prop_assert!(instance.replay(&g.c_max).unwrap(), "{:?}", cell),
            other => prop_assert!(false, "{:?} did not fail: {}", cell, other.label()),
        }
        prop_assert!(c.instance_ref.is_some());
    }
}

#[test]
fn super_multi_trials_on_finite_domains() {
    // odd linear trials run on finite domains
    let g = gen(0, 200);
    let mut passed = 0;
    for trial in (1..200).step_by(2) {
        match run_trial(PropertyId::SuperMulti, DominanceKind::Linear, &g, trial).unwrap() {
            TrialOutcome::Pass => passed += 1,
            TrialOutcome::Inconclusive(_) => {}
            TrialOutcome::Fail(i) => panic!("trial {trial}: {}", i.certificate()),
        }
    }
    assert!(passed >= 90, "{passed}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // ĥ ≤ c·f·g on a finite domain splits as f̂ = ĥ/g (0 where g = 0),
    // ĝ = g
    #[test]
    fn super_multi_construction(rows in prop::collection::vec((rational(), rational(), 0i64..=8), 1..16), alpha in 1i64..9) {
        let f = table(&rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
        let g = table(&rows.iter().map(|r| r.1.clone()).collect::<Vec<_>>());
        let hh: Vec<Q> = rows.iter().map(|r| &(&r.0 * &r.1) * &Q::new(alpha * r.2, 8)).collect();
        let h = table(&hh);
        let fg: Vec<Q> = rows.iter().map(|r| &r.0 * &r.1).collect();
        prop_assert!(holds(&h, &table(&fg)));
        let fhat: Vec<Q> = rows.iter().zip(&hh).map(|(r, h)| if r.1.is_zero() { Q::zero() } else { h / &r.1 }).collect();
        let (fh, gh) = (table(&fhat), g.clone());
        for (i, h) in hh.iter().enumerate() {
            prop_assert_eq!(&(&fhat[i] * &rows[i].1), h);
        }
        prop_assert!(holds(&fh, &f));
        prop_assert!(holds(&gh, &g));
    }

    #[test]
    fn membership_through_samples(rows in prop::collection::vec((rational(), rational()), 1..12), seeds in prop::collection::vec(prop::collection::vec(0i64..=4, 12), 19)) {
        let f = table(&rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
        let gv: Vec<Q> = rows.iter().map(|r| r.1.clone()).collect();
        let g = table(&gv);
        // g itself plus 19 scaled copies w·g with w ∈ {0, 1/2, .., 2}
        let mut hs = vec![g.clone()];
        for w in &seeds {
            hs.push(table(&gv.iter().enumerate().map(|(i, v)| v * &Q::new(w[i], 2)).collect::<Vec<_>>()));
        }
        for h in &hs {
            prop_assert!(holds(h, &g));
        }
        prop_assert_eq!(holds(&g, &f), hs.iter().all(|h| holds(h, &f)));
    }
}

#[test]
fn finite_linear_uses_the_whole_domain() {
    let f = table(&[Q::int(1), Q::int(2)]);
    let g = table(&[Q::int(3), Q::int(1)]);
    let Verdict::Holds { witness, .. } = decide_finite(DominanceKind::Linear, &g, &f).unwrap() else { panic!() };
    assert_eq!(witness.filter, FilterParam::Whole);
    assert_eq!(witness.c, Q::int(3));
}
