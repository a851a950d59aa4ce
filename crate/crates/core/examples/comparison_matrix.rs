// Reproduce the property/kind comparison table with seeded trials.
//! Usage: `comparison_matrix [trials]`.

use dominance_lab::dominance::DominanceKind;
use dominance_lab::properties::{comparison_matrix, expected, render_matrix, Cell, InstanceGen, PropertyId};

pub fn run_example(trials: usize, properties: &[PropertyId]) -> Vec<Cell> {
    let gen = InstanceGen { trials, ..InstanceGen::default() };
    let kinds = DominanceKind::ALL;
    let cells = comparison_matrix(&kinds, properties, &gen).expect("matrix");
    print!("{}", render_matrix(&cells, &kinds));
    for c in &cells {
        if !c.status.matches(expected(c.property, c.kind)) {
            println!("unexpected: {} under {}: {:?}", c.property, c.kind, c.status.label());
        }
    }
    cells
}

#[allow(dead_code)]
fn main() {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    run_example(trials, PropertyId::ALL);
}
