macro_rules! example {
    ($name:ident, $file:literal) => {
        mod $name {
            include!($file);
        }
    };
}

example!(decide_relation, "../examples/decide_relation.rs");
example!(compare_functions, "../examples/compare_functions.rs");
example!(master_recurrence, "../examples/master_recurrence.rs");
example!(ceiling_division, "../examples/ceiling_division.rs");
example!(omap_laws, "../examples/omap_laws.rs");
example!(case_analysis, "../examples/case_analysis.rs");
example!(down_sets, "../examples/down_sets.rs");
example!(proof_ledger, "../examples/proof_ledger.rs");
example!(cli_session, "../examples/cli_session.rs");
example!(counterexamples, "../examples/counterexamples.rs");

use dominance_lab::dominance::{Comparison, DominanceKind};
use dominance_lab::func::Value;
use dominance_lab::master::CeilAnswer;

#[test]
fn decide_relation_fails_only_where_the_zero_gap_matters() {
    for (kind, v) in decide_relation::run_example() {
        // the gap sits on the axis m = 0, which asymptotic filters drop
        let expect_holds = matches!(kind, DominanceKind::Asymptotic | DominanceKind::Trivial);
        assert_eq!(v.holds(), expect_holds, "{kind:?}: {}", v.label());
    }
}

#[test]
fn compare_functions() {
    assert_eq!(
        compare_functions::run_example(),
        vec![Comparison::Equivalent, Comparison::StrictlyLess, Comparison::StrictlyGreater, Comparison::Incomparable]
    );
}

#[test]
fn master_recurrence() {
    let labels = master_recurrence::run_example();
    assert_eq!(labels[0], "n");
    assert_eq!(labels[3], "n*log(2,n)");
    assert_eq!(labels[6], "pow(n,2)");
}

#[test]
fn ceiling_division() {
    let out = ceiling_division::run_example();
    assert_eq!(out[0], CeilAnswer::Value(125));
    assert_eq!(out[1], CeilAnswer::Count(10));
    assert_eq!(out[2], CeilAnswer::FixedPoints(vec![1]));
    assert_eq!(out.len(), 5);
    assert!(matches!(&out[4], CeilAnswer::FixedPoints(v) if v.contains(&2)));
}

#[test]
fn omap_laws() {
    assert!(omap_laws::run_example().iter().all(|r| r.passed()));
}

#[test]
fn case_analysis() {
    let rows = case_analysis::run_example();
    let five = rows.iter().find(|r| r.z == vec![5]).unwrap();
    assert_eq!(five.worst, Value::int(10));
    assert_eq!(five.best, Value::int(4));
}

#[test]
fn down_sets() {
    // the diamond has six down-sets: ∅, a, ab, ac, abc, abcd
    assert_eq!(down_sets::run_example(), 6);
}

#[test]
fn proof_ledger() {
    assert_eq!(proof_ledger::run_example(), (true, 1));
}

#[test]
fn cli_session() {
    assert_eq!(cli_session::run_example(), vec![1, 0, 0, 2]);
}

#[test]
fn counterexamples() {
    assert!(counterexamples::run_example().iter().all(|(_, ok)| *ok));
}
