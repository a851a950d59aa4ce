//! Command-line front end. Every subcommand builds a serializable report,
//! renders it as JSON or a plain table and maps the outcome to an exit
//! code: 0 clean, 1 failures found, 2 usage or input errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::casework::{case_report, insertion_sort_instance, plane_instance, uniform_weights, CaseRow};
use crate::dominance::{compare, decide, Comparison, DominanceKind, Verdict};
use crate::error::{Error, Result};
use crate::func::{parse_function, Value};
use crate::master::{
    eval_master, master_theta_class, verify_master_bounds, BoundsReport, MasterParams, Method, ThetaReport, Variant,
};
use crate::num::Q;
use crate::omap::{check_o_equality, check_o_mapping, OReport, OTransform};
use crate::parse::{parse_domain, parse_rational};
use crate::preorder::{classify_map, down_sets, separating_cases, DownSetAnswer, DownSetQuery, FinitePreorder, MapClassification};
use crate::proofcheck::{check_ledger, parse_any, LedgerReport, CORPUS};
use crate::properties::registry::{registry_ids, run_counterexample, CaseResult};
use crate::properties::{check_property, comparison_matrix, expected, render_matrix, Cell, InstanceGen, PropertyId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dominance-lab", version, about = "Dominance preorders on resource-consumption functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

fn q_arg(s: &str) -> std::result::Result<Q, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long, default_value = "linear")]
    pub kind: DominanceKind,
    #[arg(long, default_value = "N")]
    pub domain: String,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
}

#[derive(Debug, Args)]
pub struct Budget {
    #[arg(long, default_value_t = crate::dominance::DEFAULT_HORIZON)]
    pub horizon: u64,
    #[arg(long, value_parser = q_arg, default_value = "1048576")]
    pub cmax: Q,
}

#[derive(Debug, Args)]
pub struct Suite {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

impl Suite {
    fn gen(&self, budget: &Budget) -> InstanceGen {
        InstanceGen { seed: self.seed, trials: self.trials, horizon: budget.horizon, c_max: budget.cmax.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseInstance {
    /// Insertion-sort comparisons grouped by input length.
    Insertion,
    /// The plane routine grouped by its first argument.
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformName {
    Translate,
    Scale,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawName {
    Mapping,
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreorderQuery {
    Enumerate,
    Generate,
    IsDownSet,
    IsPrincipal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide `g ⪯ f` under one dominance kind.
    Decide {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        budget: Budget,
    },
    /// Decide both directions and classify the pair.
    Compare {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        budget: Budget,
    },
    /// Run the property trials for the listed properties.
    Props {
        #[arg(long = "property", required = true, num_args = 1..)]
        properties: Vec<PropertyId>,
        /// Restrict to these kinds (default: all).
        #[arg(long = "kind", num_args = 1..)]
        kinds: Vec<DominanceKind>,
        #[command(flatten)]
        suite: Suite,
        #[command(flatten)]
        budget: Budget,
    },
    /// The property by kind comparison table.
    Matrix {
        #[arg(long = "property", num_args = 1..)]
        properties: Vec<PropertyId>,
        #[arg(long = "kind", num_args = 1..)]
        kinds: Vec<DominanceKind>,
        #[command(flatten)]
        suite: Suite,
        #[command(flatten)]
        budget: Budget,
    },
    /// Re-run registered counterexamples (all when no id is given).
    Counterexample { ids: Vec<String> },
    /// Classify a divide-and-conquer recurrence.
    Master {
        #[arg(long, default_value = "powers")]
        variant: Variant,
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: String,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: String,
        #[arg(short = 'c', allow_hyphen_values = true)]
        c: String,
        #[arg(short = 'd', default_value = "1", allow_hyphen_values = true)]
        d: String,
        /// Driving term over `n`; defaults to `pow(n,c)`.
        #[arg(long)]
        driving: Option<String>,
        #[arg(long, default_value = "1")]
        k_lo: String,
        #[arg(long, default_value = "1")]
        k_hi: String,
        #[arg(long, default_value_t = 12)]
        horizon_exp: u32,
        /// Points at which to evaluate the recurrence.
        #[arg(long = "eval", num_args = 1..)]
        eval: Vec<String>,
        #[arg(long, default_value = "closed")]
        method: Method,
        /// Also check the ceiling-division bounds up to this `n`.
        #[arg(long)]
        bounds: Option<u64>,
    },
    /// Worst, best and average cases of a bundled instance.
    Cases {
        #[arg(long, value_enum, default_value_t = CaseInstance::Insertion)]
        instance: CaseInstance,
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
    /// Check a transform against the O-mapping or O-equality law.
    Omap {
        #[arg(long, value_enum)]
        transform: TransformName,
        #[arg(long, value_parser = q_arg)]
        alpha: Q,
        #[arg(long, value_enum, default_value_t = LawName::Mapping)]
        law: LawName,
        #[command(flatten)]
        suite: Suite,
        #[command(flatten)]
        budget: Budget,
    },
    /// Down-set queries and map classification on finite preorders.
    Preorder {
        /// Preorder in the text format; `--chain` builds one instead.
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        chain: Option<usize>,
        #[arg(long, value_enum, default_value_t = PreorderQuery::Enumerate)]
        query: PreorderQuery,
        /// Comma-separated element labels for the query.
        #[arg(long, default_value = "")]
        set: String,
        /// Classify the map given by `--map` into this preorder.
        #[arg(long, requires = "map")]
        target: Option<PathBuf>,
        /// Comma-separated target labels, one per source element.
        #[arg(long, requires = "target")]
        map: Option<String>,
        /// Check the bundled separating examples.
        #[arg(long, conflicts_with_all = ["file", "chain", "target"])]
        separating: bool,
    },
    /// Check a theorem ledger (text or JSON).
    Proofcheck {
        #[arg(required_unless_present = "bundled")]
        file: Option<PathBuf>,
        /// Check the bundled implication ledger.
        #[arg(long, conflicts_with = "file")]
        bundled: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecideReport {
    pub kind: DominanceKind,
    pub domain: String,
    pub g: String,
    pub f: String,
    pub horizon: u64,
    pub c_max: Q,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub kind: DominanceKind,
    pub domain: String,
    pub f: String,
    pub g: String,
    pub comparison: Comparison,
    pub f_le_g: Verdict,
    pub g_le_f: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub cells: Vec<Cell>,
    /// `property/kind` of every cell that disagrees with the expected table.
    pub unexpected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterReport {
    pub theta: ThetaReport,
    pub method: Method,
    pub evaluations: Vec<(Q, Value)>,
    pub bounds: Option<BoundsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CasesReport {
    pub instance: String,
    pub rows: Vec<CaseRow>,
    /// Rows where `best ≤ average ≤ worst` fails.
    pub disordered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreorderReport {
    pub preorder: String,
    pub answer: DownSetAnswer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatingReport {
    pub id: char,
    pub classification: MapClassification,
    /// Stated flags the computed classification contradicts.
    pub contradicted: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Decide(DecideReport),
    Compare(CompareReport),
    Props(CellReport),
    Matrix(CellReport),
    Counterexample { cases: Vec<CaseResult> },
    Master(MasterReport),
    Cases(CasesReport),
    Omap(OReport),
    Preorder(PreorderReport),
    Classify { classification: MapClassification },
    Separating { cases: Vec<SeparatingReport> },
    Proofcheck(LedgerReport),
}

impl Report {
    /// The exit code the outcome maps to.
    pub fn exit_code(&self) -> i32 {
        let found = match self {
            Report::Decide(r) => r.verdict.fails(),
            Report::Compare(_) | Report::Preorder(_) | Report::Classify { .. } => false,
            Report::Props(r) | Report::Matrix(r) => !r.unexpected.is_empty(),
            Report::Counterexample { cases } => cases.iter().any(|c| !c.passed()),
            Report::Master(r) => {
                !r.theta.violations.is_empty() || !r.theta.stability.stable || r.bounds.as_ref().is_some_and(|b| !b.clean())
            }
            Report::Cases(r) => !r.disordered.is_empty(),
            Report::Omap(r) => !r.passed(),
            Report::Separating { cases } => cases.iter().any(|c| !c.contradicted.is_empty()),
            Report::Proofcheck(r) => !r.clean(),
        };
        if found {
            EXIT_FOUND
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Decide(r) => {
                let _ = writeln!(s, "{} ⪯ {} ({}, {}): {}", r.g, r.f, r.kind, r.domain, r.verdict);
            }
            Report::Compare(r) => {
                let _ = writeln!(s, "f = {}, g = {} ({}, {})", r.f, r.g, r.kind, r.domain);
                let _ = writeln!(s, "f ⪯ g: {}", r.f_le_g);
                let _ = writeln!(s, "g ⪯ f: {}", r.g_le_f);
                let _ = writeln!(s, "{}", r.comparison.label());
            }
            Report::Props(r) => {
                for c in &r.cells {
                    let _ = write!(s, "{:<14}{:<14}{:<15}trials {}", c.property.name(), c.kind.name(), c.status.label(), c.trials);
                    if let crate::properties::CellStatus::Failed { certificate, .. } = &c.status {
                        let _ = write!(s, "  {certificate}");
                    }
                    s.push('\n');
                }
                unexpected_lines(&mut s, &r.unexpected);
            }
            Report::Matrix(r) => {
                let mut kinds: Vec<DominanceKind> = vec![];
                for c in &r.cells {
                    if !kinds.contains(&c.kind) {
                        kinds.push(c.kind);
                    }
                }
                s.push_str(&render_matrix(&r.cells, &kinds));
                unexpected_lines(&mut s, &r.unexpected);
            }
            Report::Counterexample { cases } => {
                for c in cases {
                    let _ = writeln!(s, "{} {}", if c.passed() { "ok  " } else { "FAIL" }, c.id);
                    for l in &c.checks {
                        let _ = writeln!(s, "  {} {}: expected {}, observed {}", if l.ok { "+" } else { "-" }, l.label, l.expected, l.observed);
                    }
                }
            }
            Report::Master(r) => {
                let t = &r.theta;
                let _ = writeln!(s, "variant {}  class {:?}  Θ({})", t.variant, t.class, t.label);
                let _ = writeln!(s, "bracket {:.6} .. {:.6}", t.c1, t.c2);
                let st = &t.stability;
                let _ = writeln!(
                    s,
                    "ratio {:.6} at 2^{} ~ {:.6} at 2^{}, drift {:.4} ({})",
                    st.ratio,
                    st.horizon_exp,
                    st.extended_ratio,
                    st.extended_exp,
                    st.drift,
                    if st.stable { "stable" } else { "unstable" }
                );
                for v in &t.violations {
                    let _ = writeln!(s, "  outside bracket: {v}");
                }
                for (x, v) in &r.evaluations {
                    let _ = writeln!(s, "T({x}) = {v}");
                }
                if let Some(b) = &r.bounds {
                    let _ = writeln!(s, "ceiling bounds b = {} up to {}: {} checked, {} violations", b.b, b.n_max, b.checked, b.violations.len());
                }
            }
            Report::Cases(r) => {
                let _ = writeln!(s, "{:>6} {:>10} {:>10} {:>12}", "z", "best", "worst", "average");
                for row in &r.rows {
                    let z = row.z.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                    let _ = writeln!(s, "{z:>6} {:>10} {:>10} {:>12}", row.best.to_string(), row.worst.to_string(), row.average.to_string());
                }
            }
            Report::Omap(r) => {
                let _ = writeln!(s, "{} {}: {} trials, {} inconclusive", r.transform, r.law, r.trials, r.inconclusive);
                let _ = match &r.status {
                    crate::omap::OStatus::Passed => writeln!(s, "passed"),
                    crate::omap::OStatus::WitnessFailed { trial, detail } => writeln!(s, "witness failed at trial {trial}: {detail}"),
                    crate::omap::OStatus::LawFailed { trial, detail } => writeln!(s, "law failed at trial {trial}: {detail}"),
                };
            }
            Report::Preorder(r) => {
                s.push_str(&r.preorder);
                let _ = writeln!(s, "{}", serde_json::to_string(&r.answer).unwrap());
            }
            Report::Classify { classification } => classification_lines(&mut s, classification),
            Report::Separating { cases } => {
                for c in cases {
                    let _ = writeln!(s, "({}) {}", c.id, if c.contradicted.is_empty() { "as stated" } else { "CONTRADICTED" });
                    for name in &c.contradicted {
                        let _ = writeln!(s, "  {name}");
                    }
                }
            }
            Report::Proofcheck(r) => s.push_str(&r.to_string()),
        }
        s
    }
}

fn unexpected_lines(s: &mut String, unexpected: &[String]) {
    for u in unexpected {
        let _ = writeln!(s, "unexpected: {u}");
    }
}

fn classification_lines(s: &mut String, c: &MapClassification) {
    let v = serde_json::to_value(c).unwrap();
    for (k, val) in v.as_object().unwrap() {
        let _ = writeln!(s, "{k:<18} {val}");
    }
}

fn cell_report(cells: Vec<Cell>) -> CellReport {
    let unexpected = cells
        .iter()
        .filter(|c| !c.status.matches(expected(c.property, c.kind)))
        .map(|c| format!("{}/{}", c.property, c.kind))
        .collect();
    CellReport { cells, unexpected }
}

fn kinds_or_all(kinds: &[DominanceKind]) -> Vec<DominanceKind> {
    if kinds.is_empty() {
        DominanceKind::ALL.to_vec()
    } else {
        kinds.to_vec()
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn labels_to_indices(p: &FinitePreorder, text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|l| p.index(l).ok_or_else(|| Error::Invalid(format!("unknown element {l:?}"))))
        .collect()
}

/// Build the report for a parsed command.
pub fn run(command: &Command) -> Result<Report> {
    Ok(match command {
        Command::Decide { pair, budget } => {
            let domain = parse_domain(&pair.domain)?;
            let f = parse_function(&domain, &pair.f)?;
            let g = parse_function(&domain, &pair.g)?;
            let verdict = decide(pair.kind, &g, &f, budget.horizon, &budget.cmax)?;
            Report::Decide(DecideReport {
                kind: pair.kind,
                domain: pair.domain.clone(),
                g: pair.g.clone(),
                f: pair.f.clone(),
                horizon: budget.horizon,
                c_max: budget.cmax.clone(),
                verdict,
            })
        }
        Command::Compare { pair, budget } => {
            let domain = parse_domain(&pair.domain)?;
            let f = parse_function(&domain, &pair.f)?;
            let g = parse_function(&domain, &pair.g)?;
            let (comparison, f_le_g, g_le_f) = compare(pair.kind, &f, &g, budget.horizon, &budget.cmax)?;
            Report::Compare(CompareReport {
                kind: pair.kind,
                domain: pair.domain.clone(),
                f: pair.f.clone(),
                g: pair.g.clone(),
                comparison,
                f_le_g,
                g_le_f,
            })
        }
        Command::Props { properties, kinds, suite, budget } => {
            let gen = suite.gen(budget);
            let mut cells = vec![];
            for &p in properties {
                for k in kinds_or_all(kinds) {
                    cells.push(check_property(p, k, &gen)?);
                }
            }
            Report::Props(cell_report(cells))
        }
        Command::Matrix { properties, kinds, suite, budget } => {
            let props = if properties.is_empty() { PropertyId::ALL.to_vec() } else { properties.clone() };
            let cells = comparison_matrix(&kinds_or_all(kinds), &props, &suite.gen(budget))?;
            Report::Matrix(cell_report(cells))
        }
        Command::Counterexample { ids } => {
            let ids: Vec<String> =
                if ids.is_empty() { registry_ids().iter().map(|s| s.to_string()).collect() } else { ids.clone() };
            Report::Counterexample { cases: ids.iter().map(|id| run_counterexample(id)).collect::<Result<_>>()? }
        }
        Command::Master { variant, a, b, c, d, driving, k_lo, k_hi, horizon_exp, eval, method, bounds } => {
            let params = match driving {
                Some(text) => MasterParams::parse(a, b, c, d, text, k_lo, k_hi)?,
                None => {
                    let driving = format!("pow(n,{})", parse_rational(c)?);
                    MasterParams::parse(a, b, c, d, &driving, k_lo, k_hi)?
                }
            };
            let theta = master_theta_class(*variant, &params, *horizon_exp)?;
            let evaluations = eval
                .iter()
                .map(|x| {
                    let x = parse_rational(x)?;
                    let v = eval_master(*variant, &params, &x, *method)?;
                    Ok((x, v))
                })
                .collect::<Result<_>>()?;
            let bounds = bounds.map(|n| verify_master_bounds(&params.b, n)).transpose()?;
            Report::Master(MasterReport { theta, method: *method, evaluations, bounds })
        }
        Command::Cases { instance, size } => {
            let (f, grouping) = match instance {
                CaseInstance::Insertion => insertion_sort_instance(*size)?,
                CaseInstance::Plane => plane_instance(*size as i64)?,
            };
            let rows = case_report(&f, &grouping, &uniform_weights(&grouping)?)?;
            let disordered = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.best.cmp_value(&r.average).is_gt() || r.average.cmp_value(&r.worst).is_gt())
                .map(|(i, _)| i)
                .collect();
            let name = match instance {
                CaseInstance::Insertion => "insertion-sort",
                CaseInstance::Plane => "plane",
            };
            Report::Cases(CasesReport { instance: name.into(), rows, disordered })
        }
        Command::Omap { transform, alpha, law, suite, budget } => {
            if !alpha.is_positive() {
                return Err(Error::Invalid("alpha must be positive".into()));
            }
            let (t, inverse) = match transform {
                TransformName::Translate => (OTransform::Translate(alpha.clone()), OTransform::untranslate(alpha.clone())),
                TransformName::Scale => (OTransform::ScaleBy(alpha.clone()), OTransform::ScaleBy(alpha.recip())),
                TransformName::Power => (OTransform::PowerBy(alpha.clone()), OTransform::PowerBy(alpha.recip())),
            };
            let gen = suite.gen(budget);
            Report::Omap(match law {
                LawName::Mapping => check_o_mapping(&t, &gen)?,
                LawName::Equality => check_o_equality(&t, &inverse, &gen)?,
            })
        }
        Command::Preorder { separating: true, .. } => {
            let cases = separating_cases()
                .into_iter()
                .map(|c| {
                    let classification = classify_map(&c.p, &c.q, &c.map)?;
                    let contradicted = c
                        .stated
                        .iter()
                        .filter(|(name, want)| classification.flag(name) != Some(*want))
                        .map(|(name, want)| format!("{name} stated {want}"))
                        .collect();
                    Ok(SeparatingReport { id: c.id, classification, contradicted })
                })
                .collect::<Result<_>>()?;
            Report::Separating { cases }
        }
        Command::Preorder { file, chain, query, set, target, map, .. } => {
            let p = match (file, chain) {
                (Some(path), _) => FinitePreorder::parse(&read(path)?)?,
                (None, Some(n)) => FinitePreorder::chain(*n),
                (None, None) => return Err(Error::Invalid("give a preorder file or --chain".into())),
            };
            if let (Some(target), Some(map)) = (target, map) {
                let q = FinitePreorder::parse(&read(target)?)?;
                let h = labels_to_indices(&q, map)?;
                return Ok(Report::Classify { classification: classify_map(&p, &q, &h)? });
            }
            let d = labels_to_indices(&p, set)?;
            let query = match query {
                PreorderQuery::Enumerate => DownSetQuery::EnumerateAll,
                PreorderQuery::Generate => DownSetQuery::Generate(d),
                PreorderQuery::IsDownSet => DownSetQuery::IsDownSet(d),
                PreorderQuery::IsPrincipal => DownSetQuery::IsPrincipal(d),
            };
            Report::Preorder(PreorderReport { preorder: p.to_string(), answer: down_sets(&p, &query) })
        }
        Command::Proofcheck { file, .. } => {
            let text = match file {
                Some(path) => read(path)?,
                None => CORPUS.to_string(),
            };
            Report::Proofcheck(check_ledger(&parse_any(&text)?))
        }
    })
}

/// Result of one invocation: exit code plus what goes to stdout and
/// stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `argv` (program name first), run and render. Writes the report
/// file when `--out` is given; never touches the process streams.
pub fn execute<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Table => report.render_table(),
    };
    let code = report.exit_code();
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) },
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Outcome {
        execute(std::iter::once("dominance-lab").chain(args.iter().copied()))
    }

    #[test]
    fn zero_gap_on_the_plane() {
        let args = ["decide", "--kind", "linear", "--domain", "N^2", "--g", "m*n + n", "--f", "m*n", "--horizon", "64", "--format", "json"];
        let out = cli(&args);
        assert_eq!(out.code, EXIT_FOUND, "{}", out.stderr);
        let report: Report = serde_json::from_str(&out.stdout).unwrap();
        let Report::Decide(r) = &report else { panic!() };
        assert!(matches!(&r.verdict, Verdict::Fails { certificate: crate::dominance::Certificate::ZeroGap { point }, exact: true } if point == &vec![0, 1]));
        assert_eq!(report.to_json(), out.stdout);
        assert_eq!(cli(&args), out);
    }

    #[test]
    fn master_balanced_integers() {
        let out = cli(&["master", "--variant", "integers", "-a", "2", "-b", "2", "-c", "1", "-d", "1", "--horizon-exp", "12", "--format", "json"]);
        assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
        let report: Report = serde_json::from_str(&out.stdout).unwrap();
        let Report::Master(r) = &report else { panic!() };
        assert_eq!(r.theta.label, "n*log(2,n)");
        assert_eq!(report.to_json(), out.stdout);
    }

    #[test]
    fn bundled_corpus() {
        let dir = std::env::temp_dir().join(format!("dominance-lab-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corpus.ledger");
        std::fs::write(&path, CORPUS).unwrap();
        let out = cli(&["proofcheck", path.to_str().unwrap()]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert!(out.stdout.contains("clean"));
        assert_eq!(cli(&["proofcheck", "--bundled"]).code, EXIT_OK);
        let broken = CORPUS.replacen("  mark Zero\n", "", 1);
        std::fs::write(&path, broken).unwrap();
        assert_eq!(cli(&["proofcheck", path.to_str().unwrap()]).code, EXIT_FOUND);
        std::fs::write(&path, "theorem A requires {Nope} proves {}\nend\n").unwrap();
        assert_eq!(cli(&["proofcheck", path.to_str().unwrap()]).code, EXIT_USAGE);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn usage_errors() {
        assert_eq!(cli(&["decide", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(cli(&["decide", "--f", "n"]).code, EXIT_USAGE);
        assert_eq!(cli(&["decide", "--f", "n +", "--g", "n"]).code, EXIT_USAGE);
        assert_eq!(cli(&["counterexample", "no-such-case"]).code, EXIT_USAGE);
        assert_eq!(cli(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn small_commands() {
        let out = cli(&["compare", "--domain", "N+", "--f", "2*n", "--g", "n + 3"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.trim_end().ends_with("equivalent"), "{}", out.stdout);
        assert_eq!(cli(&["cases", "--size", "4"]).code, EXIT_OK);
        assert_eq!(cli(&["preorder", "--chain", "3", "--query", "is-principal", "--set", "0,1"]).code, EXIT_OK);
        assert_eq!(cli(&["preorder", "--separating"]).code, EXIT_OK);
        assert_eq!(cli(&["counterexample", "even-zero-subcomp"]).code, EXIT_OK);
        let out = cli(&["omap", "--transform", "scale", "--alpha", "3", "--law", "equality", "--trials", "10", "--format", "json"]);
        assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
        let report: Report = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(report.to_json(), out.stdout);
    }
}
