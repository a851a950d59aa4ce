// Decide `g ⪯ f` under each dominance kind for a pair on the plane.

use dominance_lab::parse::parse_domain;
use dominance_lab::dominance::{decide, default_c_max, replay, DominanceKind, Verdict};
use dominance_lab::func::parse_function;

pub fn run_example() -> Vec<(DominanceKind, Verdict)> {
    let plane = parse_domain("N^2").unwrap();
    let g = parse_function(&plane, "m*n + n").unwrap();
    let f = parse_function(&plane, "m*n").unwrap();
    let mut out = vec![];
    for kind in DominanceKind::ALL {
        let v = decide(kind, &g, &f, 64, &default_c_max()).unwrap();
        assert!(replay(kind, &g, &f, &v).unwrap());
        println!("{:<13} {}", kind.name(), v.label());
        out.push((kind, v));
    }
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
