// Classify a few pairs as equivalent, strictly less, greater or incomparable.

use dominance_lab::parse::parse_domain;
use dominance_lab::dominance::{compare, default_c_max, Comparison, DominanceKind};
use dominance_lab::func::parse_function;

pub fn run_example() -> Vec<Comparison> {
    let pos = parse_domain("N+").unwrap();
    let pairs = [("2*n", "n + 3"), ("n", "pow(n,2)"), ("pow(n,3)", "n*log(2,n)"), ("n - 2*floor(0.5*n)", "1 - n + 2*floor(0.5*n)")];
    pairs
        .iter()
        .map(|(f, g)| {
            let (f, g) = (parse_function(&pos, f).unwrap(), parse_function(&pos, g).unwrap());
            let (cmp, _, _) = compare(DominanceKind::Asymptotic, &f, &g, 256, &default_c_max()).unwrap();
            println!("{} vs {}: {}", f, g, cmp.label());
            cmp
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    run_example();
}
