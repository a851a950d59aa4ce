// Run every registry counterexample and print its checks.

use dominance_lab::properties::{registry_ids, run_counterexample};

pub fn run_example() -> Vec<(String, bool)> {
    let mut out = Vec::new();
    for id in registry_ids() {
        let res = run_counterexample(id).expect("registry cases build");
        println!("{id}: {}", if res.passed() { "ok" } else { "MISMATCH" });
        for c in &res.checks {
            println!("  [{}] {}: expected {}, got {}", if c.ok { "x" } else { " " }, c.label, c.expected, c.observed);
        }
        out.push((id.to_string(), res.passed()));
    }
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
