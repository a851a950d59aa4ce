// Drive the command-line front end in process.

use dominance_lab::cli::execute;

pub fn run_example() -> Vec<i32> {
    let sessions: [&[&str]; 4] = [
        &["decide", "--kind", "linear", "--domain", "N^2", "--g", "m*n + n", "--f", "m*n", "--horizon", "64"],
        &["master", "--variant", "integers", "-a", "2", "-b", "2", "-c", "1", "-d", "1", "--horizon-exp", "12"],
        &["proofcheck", "--bundled"],
        &["decide", "--kind", "sideways"],
    ];
    sessions
        .iter()
        .map(|args| {
            let out = execute(std::iter::once("dominance-lab").chain(args.iter().copied()));
            println!("$ dominance-lab {}\n{}{}exit {}\n", args.join(" "), out.stdout, out.stderr, out.code);
            out.code
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    run_example();
}
