// Evaluate and classify `T(n) = a·T(n/b) + n^c` in its three variants.

use dominance_lab::master::{eval_master, master_theta_class, MasterParams, Method, Variant};
use dominance_lab::num::Q;

pub fn run_example() -> Vec<String> {
    let mut labels = vec![];
    for (a, b, c) in [(1, 2, 1), (2, 2, 1), (4, 2, 1)] {
        let p = MasterParams::monomial(Q::int(a), Q::int(b), Q::int(c), Q::one(), Q::one()).unwrap();
        for variant in [Variant::Powers, Variant::Reals, Variant::Integers] {
            let r = master_theta_class(variant, &p, 10).unwrap();
            let at = eval_master(variant, &p, &Q::int(1024), Method::Closed).unwrap();
            println!("a={a} b={b} c={c} {:<8} Θ({}) c1={:.3} c2={:.3} T(1024)={at}", variant.name(), r.label, r.c1, r.c2);
            labels.push(r.label);
        }
    }
    labels
}

#[allow(dead_code)]
fn main() {
    run_example();
}
