// Iterated ceiling division: iterates, counts, fixed points and bounds.

use dominance_lab::master::{ceiling_division, verify_master_bounds, CeilAnswer, CeilQuery};
use dominance_lab::num::Q;

pub fn run_example() -> Vec<CeilAnswer> {
    let mut out = vec![];
    for b in [Q::int(2), Q::new(3, 2)] {
        for q in [CeilQuery::Iterate { n: 1000, i: 3 }, CeilQuery::Count { n: 1000 }, CeilQuery::FixedPoints] {
            match ceiling_division(&b, &q) {
                Ok(a) => {
                    println!("b={b} {q:?}: {a}");
                    out.push(a);
                }
                // 3/2 gets stuck at the fixed point 2
                Err(e) => println!("b={b} {q:?}: {e}"),
            }
        }
    }
    let report = verify_master_bounds(&Q::int(2), 10_000).unwrap();
    println!("bounds up to 10^4 clean: {}", report.clean());
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
