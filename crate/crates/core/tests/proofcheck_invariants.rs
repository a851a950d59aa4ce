use std::collections::BTreeSet;

use dominance_lab::proofcheck::{check_ledger, corpus, parse_ledger, Mutation, Step};
use dominance_lab::properties::PropertyId;
use proptest::prelude::*;

fn all_properties() -> Vec<String> {
    PropertyId::ALL.iter().map(|p| p.name().to_string()).collect()
}

/// Every single fault whose effect stays inside one theorem.
fn eligible_mutations() -> Vec<Mutation> {
    let ledger = corpus();
    let referenced: BTreeSet<&str> = ledger
        .theorems
        .iter()
        .flat_map(|t| t.steps.iter())
        .filter_map(|s| match s {
            Step::Ref(r) => Some(r.as_str()),
            _ => None,
        })
        .collect();
    let mut out = vec![];
    for t in &ledger.theorems {
        for p in &t.requires {
            let consumers = t
                .steps
                .iter()
                .filter(|s| match s {
                    Step::Use(q) => q == p,
                    Step::Ref(r) => ledger.get(r).is_some_and(|r| r.requires.contains(p)),
                    Step::Mark(_) => false,
                })
                .count();
            if consumers == 1 && !referenced.contains(t.id.as_str()) {
                out.push(Mutation::DropRequire { theorem: t.id.clone(), property: p.clone() });
            }
        }
        if !referenced.contains(t.id.as_str()) {
            for p in all_properties() {
                let marked = t.steps.iter().any(|s| match s {
                    Step::Mark(q) | Step::Use(q) => *q == p,
                    Step::Ref(r) => ledger.get(r).is_some_and(|r| r.requires.contains(&p) || r.proves.contains(&p)),
                });
                if !t.requires.contains(&p) && !t.proves.contains(&p) && !marked {
                    out.push(Mutation::AddRequire { theorem: t.id.clone(), property: p });
                }
            }
        }
        if let Some(Step::Mark(_)) = t.steps.last() {
            if !referenced.contains(t.id.as_str()) {
                out.push(Mutation::DeleteMark { theorem: t.id.clone(), step: t.steps.len() - 1 });
            }
        }
    }
    out
}

#[test]
fn every_eligible_single_fault_is_reported_once() {
    let mutations = eligible_mutations();
    assert!(mutations.len() > 100, "{}", mutations.len());
    for m in mutations {
        let ledger = m.apply(&corpus());
        let report = check_ledger(&ledger);
        assert_eq!(report.violations.len(), 1, "{m:?}: {:?}", report.violations);
        assert_eq!(report.violations[0].kind.name(), m.expected_kind(), "{m:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn theorem_order_does_not_matter(perm in Just(corpus().theorems.len()).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
        let base = corpus();
        let mut shuffled = base.clone();
        shuffled.theorems = perm.iter().map(|&i| base.theorems[i].clone()).collect();
        let report = check_ledger(&shuffled);
        prop_assert!(report.clean(), "{}", report);
        prop_assert_eq!(check_ledger(&shuffled), report);
        let text = shuffled.to_string();
        prop_assert_eq!(parse_ledger(&text).unwrap(), shuffled);
    }

    #[test]
    fn dropping_a_theorem_breaks_exactly_its_callers(i in 0usize..24) {
        let base = corpus();
        let mut ledger = base.clone();
        let gone = ledger.theorems.remove(i % base.theorems.len());
        let report = check_ledger(&ledger);
        let callers: BTreeSet<&str> = ledger
            .theorems
            .iter()
            .filter(|t| t.steps.iter().any(|s| matches!(s, Step::Ref(r) if *r == gone.id)))
            .map(|t| t.id.as_str())
            .collect();
        let broken: BTreeSet<&str> = report.violations.iter().map(|v| v.theorem.as_str()).collect();
        prop_assert_eq!(&broken, &callers);
        for c in callers {
            prop_assert!(report.violations.iter().any(|v| v.theorem == c && v.kind.name() == "unknownReference"));
        }
    }
}
