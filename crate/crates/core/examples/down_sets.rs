// Down-sets of a small preorder and the classification of a map.

use dominance_lab::preorder::{classify_map, separating_cases, FinitePreorder};

pub fn run_example() -> usize {
    let p = FinitePreorder::parse("elements a, b, c, d\na <= b, a <= c, b <= d, c <= d\n").unwrap();
    let downs = p.enumerate_down_sets();
    for d in &downs {
        let names: Vec<&str> = d.iter().map(|&i| p.labels()[i].as_str()).collect();
        let principal = p.is_principal(d).map(|i| p.labels()[i].clone()).unwrap_or("-".into());
        println!("{{{}}} principal: {principal}", names.join(", "));
    }
    for case in separating_cases() {
        let c = classify_map(&case.p, &case.q, &case.map).unwrap();
        println!("case {}: residuated={} p_injective={} p_surjective={}", case.id, c.residuated, c.p_injective, c.p_surjective);
    }
    downs.len()
}

#[allow(dead_code)]
fn main() {
    run_example();
}
