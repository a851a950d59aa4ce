use dominance_lab::casework::{case_report, insertion_sort_instance, Grouping};
use dominance_lab::domain::DomainSpec;
use dominance_lab::func::{Mode, ResourceFunction, Value};
use dominance_lab::num::Q;
use proptest::prelude::*;

fn weights(source: &DomainSpec, raw: &[i64]) -> ResourceFunction {
    // at least weight 1 on the first point of the list keeps every fiber massive
    ResourceFunction::tabulate(source.clone(), Mode::Exact, |p| {
        let i = source.index_of(p).unwrap();
        Ok(Value::Exact(Q::new(raw[i % raw.len()] + 1, 3)))
    })
    .unwrap()
}

fn le(a: &Value, b: &Value) -> bool {
    a.cmp_value(b).is_le()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn best_average_worst_are_ordered(raw in prop::collection::vec(0i64..30, 1..40)) {
        let (f, g) = insertion_sort_instance(4).unwrap();
        let w = weights(g.source(), &raw);
        for row in case_report(&f, &g, &w).unwrap() {
            prop_assert!(le(&row.best, &row.average) && le(&row.average, &row.worst), "{:?}", row);
            prop_assert_eq!(f.eval(&row.worst_case).unwrap(), row.worst.clone());
            prop_assert_eq!(f.eval(&row.best_case).unwrap(), row.best.clone());
        }
    }

    #[test]
    fn any_section_is_bracketed(values in prop::collection::vec(0i64..50, 36), picks in prop::collection::vec(any::<prop::sample::Index>(), 6)) {
        let pts: Vec<Vec<i64>> = (0..6).flat_map(|m| (0..6).map(move |n| vec![m, n])).collect();
        let source = DomainSpec::finite_with_dim(2, pts).unwrap();
        let f = ResourceFunction::tabulate(source.clone(), Mode::Exact, |p| Ok(Value::int(values[source.index_of(p).unwrap()]))).unwrap();
        let g = Grouping::by_coords(source.clone(), &[0]).unwrap();
        let w = weights(&source, &[0]);
        let rows = case_report(&f, &g, &w).unwrap();
        for ((_, fiber), (row, pick)) in g.fibers().iter().zip(rows.iter().zip(&picks)) {
            let x = pick.get(fiber);
            let v = f.eval(x).unwrap();
            prop_assert!(le(&row.best, &v) && le(&v, &row.worst));
        }
    }
}
