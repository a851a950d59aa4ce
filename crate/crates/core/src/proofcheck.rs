//! Bookkeeping checks for theorem-dependency ledgers.
//!
//! A ledger is a list of theorem records. Each record declares the
//! properties it assumes and the ones it proves, followed by an ordered
//! proof: references to other theorems, uses of established properties
//! and writer-asserted marks. The checker verifies that every reference
//! has its assumptions met, every claim is eventually established and no
//! assumption is left unused. It does not look at mathematics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::properties::PropertyId;

/// The implication-table ledger shipped with the crate.
pub const CORPUS: &str = include_str!("../data/implications.ledger");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "arg", rename_all = "lowercase")]
pub enum Step {
    Ref(String),
    Use(String),
    Mark(String),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Ref(t) => write!(f, "ref {t}"),
            Step::Use(p) => write!(f, "use {p}"),
            Step::Mark(p) => write!(f, "mark {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub id: String,
    pub requires: BTreeSet<String>,
    pub proves: BTreeSet<String>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Ledger {
    /// Free-form tags allowed next to the property names.
    #[serde(default)]
    pub vocabulary: BTreeSet<String>,
    pub theorems: Vec<TheoremRecord>,
}

fn set_text(s: &BTreeSet<String>) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.vocabulary.is_empty() {
            writeln!(f, "vocabulary {{{}}}", set_text(&self.vocabulary))?;
        }
        for t in &self.theorems {
            writeln!(f, "theorem {} requires {{{}}} proves {{{}}}", t.id, set_text(&t.requires), set_text(&t.proves))?;
            for s in &t.steps {
                writeln!(f, "  {s}")?;
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

impl Ledger {
    pub fn get(&self, id: &str) -> Option<&TheoremRecord> {
        self.theorems.iter().find(|t| t.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut TheoremRecord> {
        self.theorems.iter_mut().find(|t| t.id == id)
    }

    /// Property names and tags this ledger may mention.
    pub fn canonical_name(&self, name: &str) -> Option<String> {
        if self.vocabulary.contains(name) {
            return Some(name.to_string());
        }
        name.parse::<PropertyId>().ok().map(|p| p.name().to_string())
    }

    /// Checks the structural invariants (unique ids, known names) of a
    /// ledger built or deserialized outside the text parser.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (k, t) in self.theorems.iter().enumerate() {
            let at = |msg: String| Error::Parse { line: k + 1, col: 1, msg };
            if !is_ident(&t.id) {
                return Err(at(format!("bad theorem id {:?}", t.id)));
            }
            if !seen.insert(t.id.as_str()) {
                return Err(at(format!("duplicate theorem id {}", t.id)));
            }
            let props = t.requires.iter().chain(&t.proves).chain(t.steps.iter().filter_map(|s| match s {
                Step::Use(p) | Step::Mark(p) => Some(p),
                Step::Ref(_) => None,
            }));
            for p in props {
                if self.canonical_name(p).as_deref() != Some(p.as_str()) {
                    return Err(at(format!("{p:?} is not in the vocabulary")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Ledger> {
        let ledger: Ledger = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() })?;
        ledger.validate()?;
        Ok(ledger)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledgers serialize")
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.pos + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((start, &rest[..len]))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.word() {
            Some((_, w)) if w == kw => Ok(()),
            _ => Err(self.err(format!("expected `{kw}`"))),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    /// `{a, b, c}` as words with their columns.
    fn set(&mut self) -> Result<Vec<(usize, &'a str)>> {
        self.punct('{')?;
        let mut out = vec![];
        self.skip_ws();
        if self.text[self.pos..].starts_with('}') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.word().ok_or_else(|| self.err("expected a name"))?);
            self.skip_ws();
            match self.text[self.pos..].chars().next() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos < self.text.len() {
            return Err(self.err("unexpected trailing text"));
        }
        Ok(())
    }
}

/// Parses the line-oriented ledger format. `#` starts a comment. An
/// optional leading `vocabulary {..}` line declares extra tags.
pub fn parse_ledger(text: &str) -> Result<Ledger> {
    let mut ledger = Ledger::default();
    let mut open: Option<TheoremRecord> = None;
    let mut ids = BTreeSet::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        last_line = k + 1;
        let body = raw.split('#').next().unwrap();
        let mut cur = Cursor { line: k + 1, text: body, pos: 0 };
        let Some((col, head)) = cur.word() else {
            cur.finish()?;
            continue;
        };
        let name = |ledger: &Ledger, cur: &Cursor, (col, w): (usize, &str)| {
            ledger.canonical_name(w).ok_or(Error::Parse { line: cur.line, col: col + 1, msg: format!("{w:?} is not in the vocabulary") })
        };
        match (head, open.as_mut()) {
            ("vocabulary", None) if ledger.theorems.is_empty() => {
                for (_, w) in cur.set()? {
                    ledger.vocabulary.insert(w.to_string());
                }
                cur.finish()?;
            }
            ("theorem", None) => {
                let (idcol, id) = cur.word().ok_or_else(|| cur.err("expected a theorem id"))?;
                if !ids.insert(id.to_string()) {
                    return Err(Error::Parse { line: k + 1, col: idcol + 1, msg: format!("duplicate theorem id {id}") });
                }
                cur.keyword("requires")?;
                let requires = cur.set()?.into_iter().map(|w| name(&ledger, &cur, w)).collect::<Result<_>>()?;
                cur.keyword("proves")?;
                let proves = cur.set()?.into_iter().map(|w| name(&ledger, &cur, w)).collect::<Result<_>>()?;
                cur.finish()?;
                open = Some(TheoremRecord { id: id.to_string(), requires, proves, steps: vec![] });
            }
            ("end", Some(_)) => {
                cur.finish()?;
                ledger.theorems.push(open.take().unwrap());
            }
            ("ref" | "use" | "mark", Some(t)) => {
                let w = cur.word().ok_or_else(|| cur.err("expected a name"))?;
                cur.finish()?;
                t.steps.push(match head {
                    "ref" => Step::Ref(w.1.to_string()),
                    "use" => Step::Use(name(&ledger, &cur, w)?),
                    _ => Step::Mark(name(&ledger, &cur, w)?),
                });
            }
            _ => return Err(Error::Parse { line: k + 1, col: col + 1, msg: format!("unexpected `{head}`") }),
        }
    }
    if let Some(t) = open {
        return Err(Error::Parse { line: last_line + 1, col: 1, msg: format!("theorem {} is missing `end`", t.id) });
    }
    Ok(ledger)
}

/// Text or JSON, decided by the first non-blank character.
pub fn parse_any(text: &str) -> Result<Ledger> {
    if text.trim_start().starts_with('{') {
        Ledger::from_json(text)
    } else {
        parse_ledger(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ViolationKind {
    UnsatisfiedAssumption { missing: Vec<String> },
    UnknownReference { theorem: String },
    UnprovenClaim { missing: Vec<String> },
    ExtraneousAssumption { property: String },
    CyclicReference { path: Vec<String> },
}

impl ViolationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ViolationKind::UnsatisfiedAssumption { .. } => "unsatisfiedAssumption",
            ViolationKind::UnknownReference { .. } => "unknownReference",
            ViolationKind::UnprovenClaim { .. } => "unprovenClaim",
            ViolationKind::ExtraneousAssumption { .. } => "extraneousAssumption",
            ViolationKind::CyclicReference { .. } => "cyclicReference",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub theorem: String,
    /// Index of the offending step; `None` for end-of-theorem findings.
    pub step: Option<usize>,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.theorem)?;
        if let Some(s) = self.step {
            write!(f, " step {s}")?;
        }
        write!(f, ": {}", self.kind.name())?;
        match &self.kind {
            ViolationKind::UnsatisfiedAssumption { missing } | ViolationKind::UnprovenClaim { missing } => {
                write!(f, " {}", missing.join(", "))
            }
            ViolationKind::UnknownReference { theorem } => write!(f, " {theorem}"),
            ViolationKind::ExtraneousAssumption { property } => write!(f, " {property}"),
            ViolationKind::CyclicReference { path } => write!(f, " {}", path.join(" -> ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub theorems: usize,
    pub violations: Vec<Violation>,
}

impl LedgerReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LedgerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clean() {
            return writeln!(f, "{} theorems, clean", self.theorems);
        }
        writeln!(f, "{} theorems, {} violations", self.theorems, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

fn check_theorem(ledger: &Ledger, t: &TheoremRecord, out: &mut Vec<Violation>) {
    let mut established = t.requires.clone();
    let mut consumed = BTreeSet::new();
    for (i, step) in t.steps.iter().enumerate() {
        let mut report = |kind| out.push(Violation { theorem: t.id.clone(), step: Some(i), kind });
        match step {
            Step::Ref(id) => {
                let Some(r) = ledger.get(id) else {
                    report(ViolationKind::UnknownReference { theorem: id.clone() });
                    continue;
                };
                let missing: Vec<String> = r.requires.difference(&established).cloned().collect();
                if !missing.is_empty() {
                    report(ViolationKind::UnsatisfiedAssumption { missing });
                }
                consumed.extend(r.requires.iter().cloned());
                established.extend(r.proves.iter().cloned());
            }
            Step::Use(p) => {
                if !established.contains(p) {
                    report(ViolationKind::UnsatisfiedAssumption { missing: vec![p.clone()] });
                }
                consumed.insert(p.clone());
            }
            Step::Mark(p) => {
                established.insert(p.clone());
            }
        }
    }
    let missing: Vec<String> = t.proves.difference(&established).cloned().collect();
    if !missing.is_empty() {
        out.push(Violation { theorem: t.id.clone(), step: None, kind: ViolationKind::UnprovenClaim { missing } });
    }
    for p in t.requires.difference(&consumed) {
        out.push(Violation { theorem: t.id.clone(), step: None, kind: ViolationKind::ExtraneousAssumption { property: p.clone() } });
    }
}

/// Every elementary cycle found by a depth-first walk in ledger order,
/// reported once at the theorem and step that closes it.
fn find_cycles(ledger: &Ledger, out: &mut Vec<Violation>) {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        New,
        Active,
        Done,
    }
    let index: BTreeMap<&str, usize> = ledger.theorems.iter().enumerate().map(|(k, t)| (t.id.as_str(), k)).collect();
    let mut state = vec![State::New; ledger.theorems.len()];
    let mut stack: Vec<usize> = vec![];

    fn visit(
        u: usize,
        ledger: &Ledger,
        index: &BTreeMap<&str, usize>,
        state: &mut Vec<State>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Violation>,
    ) {
        state[u] = State::Active;
        stack.push(u);
        for (i, s) in ledger.theorems[u].steps.iter().enumerate() {
            let Step::Ref(id) = s else { continue };
            let Some(&v) = index.get(id.as_str()) else { continue };
            match state[v] {
                State::New => visit(v, ledger, index, state, stack, out),
                State::Active => {
                    let from = stack.iter().position(|&w| w == v).unwrap();
                    let mut path: Vec<String> = stack[from..].iter().map(|&w| ledger.theorems[w].id.clone()).collect();
                    path.push(id.clone());
                    out.push(Violation {
                        theorem: ledger.theorems[u].id.clone(),
                        step: Some(i),
                        kind: ViolationKind::CyclicReference { path },
                    });
                }
                State::Done => {}
            }
        }
        stack.pop();
        state[u] = State::Done;
    }

    for u in 0..ledger.theorems.len() {
        if state[u] == State::New {
            visit(u, ledger, &index, &mut state, &mut stack, out);
        }
    }
}

/// Runs every check. Findings are collected, never raised.
pub fn check_ledger(ledger: &Ledger) -> LedgerReport {
    let mut violations = vec![];
    for t in &ledger.theorems {
        check_theorem(ledger, t, &mut violations);
    }
    find_cycles(ledger, &mut violations);
    LedgerReport { theorems: ledger.theorems.len(), violations }
}

pub fn corpus() -> Ledger {
    parse_ledger(CORPUS).expect("bundled corpus parses")
}

/// Seeded single-fault mutations used to exercise the checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    DropRequire { theorem: String, property: String },
    AddRequire { theorem: String, property: String },
    DeleteMark { theorem: String, step: usize },
}

impl Mutation {
    pub fn apply(&self, ledger: &Ledger) -> Ledger {
        let mut out = ledger.clone();
        match self {
            Mutation::DropRequire { theorem, property } => {
                out.get_mut(theorem).expect("known theorem").requires.remove(property);
            }
            Mutation::AddRequire { theorem, property } => {
                out.get_mut(theorem).expect("known theorem").requires.insert(property.clone());
            }
            Mutation::DeleteMark { theorem, step } => {
                let t = out.get_mut(theorem).expect("known theorem");
                assert!(matches!(t.steps[*step], Step::Mark(_)));
                t.steps.remove(*step);
            }
        }
        out
    }

    /// The violation kind a clean ledger should show after this mutation.
    pub fn expected_kind(&self) -> &'static str {
        match self {
            Mutation::DropRequire { .. } => "unsatisfiedAssumption",
            Mutation::AddRequire { .. } => "extraneousAssumption",
            Mutation::DeleteMark { .. } => "unprovenClaim",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO: &str = "
theorem ZeroSeparationIsImplied requires {Order, Trans, One, NSubHom} proves {Zero}
  use Order
  use Trans
  use One
  use NSubHom
  mark Zero
end
";

    fn kinds(r: &LedgerReport) -> Vec<&'static str> {
        r.violations.iter().map(|v| v.kind.name()).collect()
    }

    #[test]
    fn zero_example() {
        let l = parse_ledger(ZERO).unwrap();
        assert!(check_ledger(&l).clean());

        let dropped = parse_ledger(&ZERO.replace("Trans, ", "")).unwrap();
        let r = check_ledger(&dropped);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].step, Some(1));
        assert_eq!(r.violations[0].kind, ViolationKind::UnsatisfiedAssumption { missing: vec!["Trans".into()] });

        let extra = parse_ledger(&ZERO.replace("NSubHom}", "NSubHom, Scale}")).unwrap();
        let r = check_ledger(&extra);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::ExtraneousAssumption { property: "Scale".into() });
    }

    #[test]
    fn parse_errors() {
        let two = "theorem A requires {} proves {Order}\n mark Order\nend\ntheorem B requires {Order} proves {}\n use Order\nend\n";
        assert_eq!(parse_ledger(two).unwrap().theorems.len(), 2);
        let dup = two.replace("theorem B", "theorem A");
        assert!(matches!(parse_ledger(&dup), Err(Error::Parse { line: 4, col: 9, .. })));
        assert!(matches!(parse_ledger("theorem A requires {Bogus} proves {}\nend"), Err(Error::Parse { line: 1, col: 21, .. })));
        assert!(parse_ledger("vocabulary {Bogus}\ntheorem A requires {Bogus} proves {}\n use Bogus\nend").is_ok());
        assert!(matches!(parse_ledger("theorem A requires {} proves {}\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ledger("use Order"), Err(Error::Parse { line: 1, col: 1, .. })));
        // names are case-insensitive and canonicalized
        let l = parse_ledger("theorem A requires {order} proves {}\n use ORDER\nend").unwrap();
        assert!(l.theorems[0].requires.contains("Order"));
    }

    #[test]
    fn order_sensitivity() {
        let base = "
theorem Composite requires {Reflex, Trans} proves {Member}
  use Reflex
  use Trans
  mark Member
end
theorem Outer requires {Trans} proves {Member}
  mark Reflex
  ref Composite
end
";
        assert!(check_ledger(&parse_ledger(base).unwrap()).clean());
        let swapped = base.replace("  mark Reflex\n  ref Composite", "  ref Composite\n  mark Reflex");
        let r = check_ledger(&parse_ledger(&swapped).unwrap());
        assert_eq!(kinds(&r), ["unsatisfiedAssumption"]);
        assert_eq!(r.violations[0].step, Some(0));
    }

    #[test]
    fn references_and_cycles() {
        let text = "
theorem A requires {} proves {Order}
  ref B
end
theorem B requires {} proves {Order}
  ref A
  ref Missing
end
";
        let r = check_ledger(&parse_ledger(text).unwrap());
        assert_eq!(kinds(&r), ["unknownReference", "cyclicReference"]);
        assert_eq!(r.violations[1].kind, ViolationKind::CyclicReference { path: vec!["A".into(), "B".into(), "A".into()] });
        let selfref = "theorem A requires {} proves {}\n ref A\nend";
        assert_eq!(kinds(&check_ledger(&parse_ledger(selfref).unwrap())), ["cyclicReference"]);
    }

    #[test]
    fn corpus_is_clean_and_round_trips() {
        let l = corpus();
        assert!(l.theorems.len() >= 10);
        let r = check_ledger(&l);
        assert!(r.clean(), "{r}");
        assert_eq!(parse_ledger(&l.to_string()).unwrap(), l);
        assert_eq!(Ledger::from_json(&l.to_json()).unwrap(), l);
        assert_eq!(parse_any(&l.to_json()).unwrap(), l);
    }

    #[test]
    fn json_validation() {
        let mut l = parse_ledger(ZERO).unwrap();
        l.theorems.push(l.theorems[0].clone());
        assert!(Ledger::from_json(&l.to_json()).is_err());
        let mut l = parse_ledger(ZERO).unwrap();
        l.theorems[0].steps.push(Step::Use("NotAProperty".into()));
        assert!(Ledger::from_json(&l.to_json()).is_err());
    }
}
