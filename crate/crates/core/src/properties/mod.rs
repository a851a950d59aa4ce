//! Property harness: seeded relation-level checks of the desirable
//! properties for each dominance kind, the counterexample registry, and the
//! comparison matrix.

mod checks;
pub mod gen;
pub mod registry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dominance::{decide, DominanceKind, Verdict};
use crate::error::{Error, Point, Result};
use crate::func::{ResourceFunction, Value};
use crate::num::Q;

pub use checks::{canonical_ref, run_trial, TrialOutcome};
pub use registry::{registry_ids, run_counterexample, CaseResult, CheckLine};

macro_rules! property_ids {
    ($($v:ident),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum PropertyId { $($v),* }

        impl PropertyId {
            pub const ALL: &'static [PropertyId] = &[$(PropertyId::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(PropertyId::$v => stringify!($v)),* }
            }
        }
    };
}

property_ids! {
    Order, Reflex, Trans, Member, Zero, One, TrivialZero, Scale, Translation, PowerH, AddCons,
    MultiCons, MaxCons, Local, ScalarHom, SubHom, QSubHom, NSubHom, NCancel, SuperHom, SubMulti,
    SuperMulti, SubRestrict, SuperRestrict, Additive, Summation, Maximum, MaximumSum, SubComp,
    ISubComp, ISuperComp, SubsetSum, Lattice,
}

impl PropertyId {
    /// The eight properties that together characterise linear dominance.
    pub const PRIMITIVE: [PropertyId; 8] = [
        PropertyId::Order,
        PropertyId::Trans,
        PropertyId::One,
        PropertyId::Scale,
        PropertyId::Local,
        PropertyId::NSubHom,
        PropertyId::NCancel,
        PropertyId::SubComp,
    ];

    pub fn index(self) -> usize {
        PropertyId::ALL.iter().position(|p| *p == self).unwrap()
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<PropertyId> {
        PropertyId::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown property {s:?}")))
    }
}

/// Configuration of a randomized suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceGen {
    pub seed: u64,
    /// Conclusive trials wanted per cell.
    pub trials: usize,
    pub horizon: u64,
    pub c_max: Q,
}

impl Default for InstanceGen {
    fn default() -> InstanceGen {
        InstanceGen { seed: 0, trials: 200, horizon: crate::dominance::DEFAULT_HORIZON, c_max: crate::dominance::default_c_max() }
    }
}

/// Expected outcome of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    Holds,
    Fails,
    /// Not settled; the harness only gathers evidence.
    EvidenceOnly,
}

/// Expected cell of the comparison table.
pub fn expected(property: PropertyId, kind: DominanceKind) -> Expected {
    use DominanceKind::*;
    use PropertyId::*;
    let fails: &[DominanceKind] = match property {
        Zero => &[Affine, Trivial],
        One => &[Trivial],
        TrivialZero => &[Cofinite, CoAsymptotic, Asymptotic, Affine, Trivial],
        SubHom | QSubHom | NSubHom | SubMulti => &[Affine],
        SuperHom => &[Cofinite, CoAsymptotic, Asymptotic, Affine, Trivial],
        SubComp => &[Cofinite, CoAsymptotic, Asymptotic],
        ISubComp => &[CoAsymptotic, Asymptotic],
        SubsetSum => &[Cofinite, CoAsymptotic, Asymptotic, Affine],
        _ => &[],
    };
    if property == ISuperComp && matches!(kind, Asymptotic | CoAsymptotic) {
        Expected::EvidenceOnly
    } else if fails.contains(&kind) {
        Expected::Fails
    } else {
        Expected::Holds
    }
}

/// One relation decided during a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub kind: DominanceKind,
    pub role: LegRole,
    pub g: ResourceFunction,
    pub f: ResourceFunction,
    pub horizon: u64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegRole {
    /// Assumed by the property; must hold for the trial to count.
    Hypothesis,
    /// Asserted by the property.
    Conclusion,
    /// Asserted not to hold (non-triviality properties).
    MustFail,
}

/// A pointwise identity the property required and the instance broke.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub note: String,
    pub point: Point,
    pub lhs: ResourceFunction,
    pub rhs: ResourceFunction,
    pub lhs_value: Value,
    pub rhs_value: Value,
}

/// Everything needed to reproduce a failed trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub description: String,
    pub legs: Vec<Leg>,
    pub mismatch: Option<Mismatch>,
}

impl Instance {
    /// Re-decide every leg and re-evaluate the mismatch; true when all
    /// recorded outcomes are reproduced.
    pub fn replay(&self, c_max: &Q) -> Result<bool> {
        for leg in &self.legs {
            let v = decide(leg.kind, &leg.g, &leg.f, leg.horizon, c_max)?;
            if v.label() != leg.verdict.label() {
                return Ok(false);
            }
        }
        if let Some(m) = &self.mismatch {
            let (a, b) = (m.lhs.eval(&m.point)?, m.rhs.eval(&m.point)?);
            let tol = m.lhs.mode().join(m.rhs.mode()).rel_tol();
            if a.eq_tol(&b, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Short description of what broke.
    pub fn certificate(&self) -> String {
        if let Some(m) = &self.mismatch {
            return format!(
                "{} at {}: {} != {}",
                m.note,
                crate::error::fmt_point(&m.point),
                m.lhs_value,
                m.rhs_value
            );
        }
        match self.legs.iter().rev().find(|l| l.role != LegRole::Hypothesis) {
            Some(l) => format!("{} ⪯ {} under {}: {}", short(&l.g), short(&l.f), l.kind, l.verdict),
            None => "no conclusion leg".into(),
        }
    }

    pub fn grade(&self) -> Grade {
        if self.mismatch.is_some() {
            return Grade::Exact;
        }
        match self.legs.iter().rev().find(|l| l.role != LegRole::Hypothesis) {
            Some(Leg { verdict: Verdict::Fails { exact: true, .. }, .. }) => Grade::Exact,
            Some(Leg { role: LegRole::MustFail, verdict: Verdict::Holds { horizon: None, .. }, .. }) => Grade::Exact,
            Some(Leg { role: LegRole::MustFail, .. }) => Grade::Witness,
            _ => Grade::Evidence,
        }
    }
}

fn short(f: &ResourceFunction) -> String {
    let s = f.to_string();
    if s.len() > 60 {
        format!("{}…", &s[..s.char_indices().take(60).last().map_or(0, |c| c.0)])
    } else {
        s
    }
}

/// Strength of the evidence behind a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grade {
    /// Pointwise identity broken, or an exact refutation.
    Exact,
    /// A Holds witness for a relation that must fail.
    Witness,
    /// Growth evidence at two horizons.
    Evidence,
    /// Randomized trials only.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellStatus {
    Passed { trials: usize, inconclusive: usize },
    Failed { trial: usize, instance: Box<Instance>, certificate: String, grade: Grade },
    /// Trials ran but the cell is not claimed either way.
    EvidenceOnly { trials: usize, failures: usize, inconclusive: usize },
    Skipped { reason: String },
}

impl CellStatus {
    pub fn symbol(&self) -> &'static str {
        match self {
            CellStatus::Passed { .. } => "✓",
            CellStatus::Failed { .. } => "✗",
            CellStatus::EvidenceOnly { .. } => "?",
            CellStatus::Skipped { .. } => "-",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CellStatus::Passed { .. } => "passed",
            CellStatus::Failed { .. } => "failed",
            CellStatus::EvidenceOnly { .. } => "evidence-only",
            CellStatus::Skipped { .. } => "skipped",
        }
    }

    pub fn matches(&self, e: Expected) -> bool {
        matches!(
            (self, e),
            (CellStatus::Passed { .. }, Expected::Holds)
                | (CellStatus::Failed { .. }, Expected::Fails)
                | (CellStatus::EvidenceOnly { .. }, Expected::EvidenceOnly)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub property: PropertyId,
    pub kind: DominanceKind,
    pub status: CellStatus,
    pub trials: usize,
    pub evidence_grade: Grade,
    /// Registry case or trial the verdict rests on.
    pub instance_ref: Option<String>,
}

/// Run the trials for one (property, kind) cell.
pub fn check_property(property: PropertyId, kind: DominanceKind, gen: &InstanceGen) -> Result<Cell> {
    let evidence_only = expected(property, kind) == Expected::EvidenceOnly;
    let mut passes = 0;
    let mut inconclusive = 0;
    let mut failures = 0;
    let mut attempts = 0;
    let max_attempts = gen.trials * 2 + 1;
    while passes < gen.trials && attempts < max_attempts {
        let trial = attempts;
        attempts += 1;
        match run_trial(property, kind, gen, trial)? {
            TrialOutcome::Pass => passes += 1,
            TrialOutcome::Inconclusive(_) => inconclusive += 1,
            TrialOutcome::Fail(instance) => {
                if evidence_only {
                    failures += 1;
                    continue;
                }
                let certificate = instance.certificate();
                let grade = instance.grade();
                let instance_ref = canonical_ref(property, kind)
                    .filter(|_| trial == 0)
                    .map(str::to_string)
                    .or_else(|| Some(format!("trial-{trial}")));
                return Ok(Cell {
                    property,
                    kind,
                    status: CellStatus::Failed { trial, instance: Box::new(instance), certificate, grade },
                    trials: attempts,
                    evidence_grade: grade,
                    instance_ref,
                });
            }
        }
    }
    let status = if evidence_only {
        CellStatus::EvidenceOnly { trials: passes, failures, inconclusive }
    } else {
        CellStatus::Passed { trials: passes, inconclusive }
    };
    Ok(Cell { property, kind, status, trials: attempts, evidence_grade: Grade::Sampled, instance_ref: None })
}

/// Assemble the cells for every requested property and kind, row by row.
pub fn comparison_matrix(kinds: &[DominanceKind], properties: &[PropertyId], gen: &InstanceGen) -> Result<Vec<Cell>> {
    let mut out = Vec::with_capacity(kinds.len() * properties.len());
    for &p in properties {
        for &k in kinds {
            out.push(check_property(p, k, gen)?);
        }
    }
    Ok(out)
}

/// Render a matrix as a fixed-width table.
pub fn render_matrix(cells: &[Cell], kinds: &[DominanceKind]) -> String {
    let mut s = format!("{:<14}", "property");
    for k in kinds {
        s.push_str(&format!("{:>14}", k.name()));
    }
    s.push('\n');
    let mut props: Vec<PropertyId> = Vec::new();
    for c in cells {
        if !props.contains(&c.property) {
            props.push(c.property);
        }
    }
    for p in props {
        s.push_str(&format!("{:<14}", p.name()));
        for k in kinds {
            let sym = cells
                .iter()
                .find(|c| c.property == p && c.kind == *k)
                .map_or(" ", |c| c.status.symbol());
            s.push_str(&format!("{sym:>14}"));
        }
        s.push('\n');
    }
    s
}
