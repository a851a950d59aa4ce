// Worst, best and average comparison counts of insertion sort.

use dominance_lab::casework::{case_report, insertion_sort_instance, uniform_weights, CaseRow};

pub fn run_example() -> Vec<CaseRow> {
    let (f, g) = insertion_sort_instance(5).unwrap();
    let rows = case_report(&f, &g, &uniform_weights(&g).unwrap()).unwrap();
    println!("n  worst best average");
    for r in &rows {
        println!("{}  {:<5} {:<4} {}", r.z[0], r.worst, r.best, r.average);
    }
    rows
}

#[allow(dead_code)]
fn main() {
    run_example();
}
