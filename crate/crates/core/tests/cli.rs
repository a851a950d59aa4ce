use std::path::PathBuf;
use std::process::{Command, Output};

use dominance_lab::cli::Report;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dominance-lab")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dominance-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn zero_gap_on_the_plane() {
    let out = bin(&["decide", "--kind", "linear", "--domain", "N^2", "--g", "m*n + n", "--f", "m*n", "--horizon", "64", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("ZeroGap") && text.contains("\"exact\": true"), "{text}");
    let report = json(&out);
    assert_eq!(report.to_json(), text);
}

#[test]
fn master_over_integers() {
    let out = bin(&["master", "--variant", "integers", "-a", "2", "-b", "2", "-c", "1", "-d", "1", "--horizon-exp", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("n*log(2,n)"));
}

#[test]
fn bundled_corpus_from_a_file() {
    let path = scratch("corpus.ledger");
    std::fs::write(&path, dominance_lab::proofcheck::CORPUS).unwrap();
    let out = bin(&["proofcheck", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("clean"));
}

#[test]
fn broken_ledger_exits_one() {
    let path = scratch("broken.ledger");
    std::fs::write(&path, "theorem T requires {} proves {Order}\nend\n").unwrap();
    let out = bin(&["proofcheck", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unprovenClaim"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["decide", "--bogus"][..], &["frobnicate"], &["decide", "--kind", "linear", "--f", "n^"], &["master", "-a", "2"]] {
        let out = bin(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn seeds_fix_the_report() {
    let args = ["props", "--property", "Scale", "--kind", "linear", "--trials", "20", "--seed", "7", "--format", "json"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report.to_json().as_bytes(), &a.stdout[..]);
}

#[test]
fn reports_round_trip() {
    for args in [
        &["cases", "--instance", "plane", "--size", "6"][..],
        &["counterexample", "strip-N2-isubcomp"],
        &["omap", "--transform", "scale", "--alpha", "3", "--law", "equality", "--trials", "10"],
        &["preorder", "--chain", "3", "--query", "generate", "--set", "1"],
        &["preorder", "--separating"],
        &["master", "-a", "4", "-b", "2", "-c", "1", "--bounds", "1000"],
    ] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--format", "json"]);
        let out = bin(&full);
        assert_ne!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let report = json(&out);
        assert_eq!(report.to_json().as_bytes(), &out.stdout[..], "{args:?}");
    }
}

#[test]
fn out_writes_the_report() {
    let path = scratch("compare.json");
    let out = bin(&["compare", "--domain", "N+", "--g", "2*n", "--f", "n + 3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("Equivalent"), "{written}");
    serde_json::from_str::<Report>(&written).unwrap();
}
