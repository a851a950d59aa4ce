// Check the bundled implication ledger, then a broken copy of it.

use dominance_lab::proofcheck::{check_ledger, corpus, Mutation};

pub fn run_example() -> (bool, usize) {
    let ledger = corpus();
    let clean = check_ledger(&ledger);
    println!("bundled: {clean}");
    let broken = Mutation::DropRequire { theorem: "SummationIsImplied".into(), property: "Order".into() }.apply(&ledger);
    let report = check_ledger(&broken);
    for v in &report.violations {
        println!("{} step {:?}: {}", v.theorem, v.step, v.kind.name());
    }
    (clean.clean(), report.violations.len())
}

#[allow(dead_code)]
fn main() {
    run_example();
}
