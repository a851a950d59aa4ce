//! Deciders for the dominance preorders, with witnesses and certificates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{fmt_point, Error, Point, Result};
use crate::func::{Mode, ResourceFunction, Value};
use crate::num::Q;

/// Default bound on witness constants, 2^20.
pub fn default_c_max() -> Q {
    Q::int(1 << 20)
}

/// Largest excluded set tried for cofinite dominance.
pub const EXCLUDED_BUDGET: usize = 32;

pub const DEFAULT_HORIZON: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DominanceKind {
    Trivial,
    Asymptotic,
    CoAsymptotic,
    Cofinite,
    Linear,
    Affine,
}

impl DominanceKind {
    pub const ALL: [DominanceKind; 6] = [
        DominanceKind::Trivial,
        DominanceKind::Asymptotic,
        DominanceKind::CoAsymptotic,
        DominanceKind::Cofinite,
        DominanceKind::Linear,
        DominanceKind::Affine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DominanceKind::Trivial => "trivial",
            DominanceKind::Asymptotic => "asymptotic",
            DominanceKind::CoAsymptotic => "coasymptotic",
            DominanceKind::Cofinite => "cofinite",
            DominanceKind::Linear => "linear",
            DominanceKind::Affine => "affine",
        }
    }

    /// Kinds implied by this one, strongest first (containment chain).
    pub fn weaker(self) -> &'static [DominanceKind] {
        use DominanceKind::*;
        match self {
            Linear => &[Cofinite, CoAsymptotic, Asymptotic, Trivial, Affine],
            Cofinite => &[CoAsymptotic, Asymptotic, Trivial, Affine],
            CoAsymptotic => &[Asymptotic, Trivial],
            Asymptotic => &[Trivial],
            Affine | Trivial => &[],
        }
    }
}

impl fmt::Display for DominanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DominanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<DominanceKind> {
        let k = s.to_ascii_lowercase().replace(['-', '_'], "");
        DominanceKind::ALL
            .into_iter()
            .find(|d| d.name() == k)
            .ok_or_else(|| Error::Invalid(format!("unknown dominance kind {s:?}")))
    }
}

/// Which part of the domain the inequality is required on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterParam {
    Whole,
    /// The empty filter set (trivial dominance, or finite-domain degeneracy).
    Empty,
    /// `x ≥ y` componentwise (asymptotic) or in some component (co-asymptotic).
    Threshold(Point),
    /// Everything except the listed points.
    ExcludedFinite(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub c: Q,
    pub filter: FilterParam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// `f = 0 < g` at the point.
    ZeroGap { point: Point },
    /// Points where `f = 0 < g` keep appearing as the box grows.
    InfiniteBadSet { predicate: String, h1: u64, count1: usize, h2: u64, count2: usize },
    /// The best ratio at least doubled when the horizon doubled.
    UnboundedRatio { p1: Point, r1: Value, h1: u64, p2: Point, r2: Value, h2: u64 },
    /// `g > c·f + c` at the listed points, for every tested `c ≤ c_max`.
    AffineGap { points: Vec<Point>, c_max: Q },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// `horizon` is `None` when the check was exhaustive.
    Holds { witness: Witness, horizon: Option<u64> },
    Fails { certificate: Certificate, exact: bool },
    Unknown { max_ratio: Option<Value>, horizon: u64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn is_exact_fail(&self) -> bool {
        matches!(self, Verdict::Fails { exact: true, .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds { .. } => "holds",
            Verdict::Fails { .. } => "fails",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds { witness, horizon } => {
                write!(f, "holds with c = {}", witness.c)?;
                match &witness.filter {
                    FilterParam::Whole => {}
                    FilterParam::Empty => write!(f, " on the empty filter set")?,
                    FilterParam::Threshold(y) => write!(f, " beyond {}", fmt_point(y))?,
                    FilterParam::ExcludedFinite(a) => write!(f, " outside {} points", a.len())?,
                }
                match horizon {
                    Some(h) => write!(f, " (horizon {h})"),
                    None => write!(f, " (exhaustive)"),
                }
            }
            Verdict::Fails { certificate, exact } => {
                let grade = if *exact { "exact" } else { "evidence" };
                match certificate {
                    Certificate::ZeroGap { point } => write!(f, "fails ({grade}): zero gap at {}", fmt_point(point)),
                    Certificate::InfiniteBadSet { h1, count1, h2, count2, .. } => write!(
                        f,
                        "fails ({grade}): bad points grow from {count1} at horizon {h1} to {count2} at {h2}"
                    ),
                    Certificate::UnboundedRatio { r1, h1, r2, h2, .. } => {
                        write!(f, "fails ({grade}): ratio {r1} at horizon {h1} grows to {r2} at {h2}")
                    }
                    Certificate::AffineGap { points, c_max } => {
                        write!(f, "fails ({grade}): {} points exceed c*f + c for c <= {c_max}", points.len())
                    }
                }
            }
            Verdict::Unknown { max_ratio, horizon } => match max_ratio {
                Some(r) => write!(f, "unknown: best ratio {r} at horizon {horizon}"),
                None => write!(f, "unknown at horizon {horizon}"),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Equivalent,
    StrictlyLess,
    StrictlyGreater,
    Incomparable,
    Unknown,
}

impl Comparison {
    pub fn label(self) -> &'static str {
        match self {
            Comparison::Equivalent => "equivalent",
            Comparison::StrictlyLess => "strictly-less",
            Comparison::StrictlyGreater => "strictly-greater",
            Comparison::Incomparable => "incomparable",
            Comparison::Unknown => "unknown",
        }
    }
}

/// Per-point ratio `g/f` (or `g/(f+1)` for affine dominance).
#[derive(Debug, Clone, PartialEq)]
enum Ratio {
    Zero,
    Finite(Value),
    Inf,
}

impl Ratio {
    fn of(kind: DominanceKind, g: &Value, f: &Value) -> Ratio {
        if g.is_zero() {
            return Ratio::Zero;
        }
        if kind == DominanceKind::Affine {
            return Ratio::Finite(g.div(&f.add(&Value::int(1))));
        }
        if f.is_zero() {
            Ratio::Inf
        } else {
            Ratio::Finite(g.div(f))
        }
    }

    fn cmp(&self, o: &Ratio) -> Ordering {
        match (self, o) {
            (Ratio::Zero, Ratio::Zero) | (Ratio::Inf, Ratio::Inf) => Ordering::Equal,
            (Ratio::Zero, _) | (_, Ratio::Inf) => Ordering::Less,
            (_, Ratio::Zero) | (Ratio::Inf, _) => Ordering::Greater,
            (Ratio::Finite(a), Ratio::Finite(b)) => a.cmp_value(b),
        }
    }

    fn value(&self) -> Option<Value> {
        match self {
            Ratio::Zero => Some(Value::int(0)),
            Ratio::Finite(v) => Some(v.clone()),
            Ratio::Inf => None,
        }
    }
}

fn shared_domain(g: &ResourceFunction, f: &ResourceFunction) -> Result<()> {
    if g.domain() != f.domain() {
        return Err(Error::DomainMismatch(format!("{} vs {}", g.domain(), f.domain())));
    }
    Ok(())
}

/// Turn a maximal ratio into a witness constant.
fn witness_c(r: &Ratio, mode: Mode) -> Q {
    match r.value() {
        Some(Value::Exact(q)) if q.is_positive() => q,
        Some(Value::Float(x)) if x > 0.0 => {
            Q::from_f64(x * (1.0 + mode.rel_tol().max(crate::num::DEFAULT_REL_TOL))).unwrap_or_else(Q::one)
        }
        _ => Q::one(),
    }
}

/// Decide `g ⪯ f` exhaustively on a shared finite domain.
pub fn decide_finite(kind: DominanceKind, g: &ResourceFunction, f: &ResourceFunction) -> Result<Verdict> {
    shared_domain(g, f)?;
    let points = g.domain().finite_points().ok_or(Error::NotFinite)?;
    let mode = g.mode().join(f.mode());
    let holds = |c: Q, filter: FilterParam| Verdict::Holds { witness: Witness { c, filter }, horizon: None };
    if points.is_empty() {
        return Ok(holds(Q::one(), FilterParam::Whole));
    }
    match kind {
        DominanceKind::Linear | DominanceKind::Affine => {
            let mut best = Ratio::Zero;
            for p in points {
                let r = Ratio::of(kind, &g.eval(p)?, &f.eval(p)?);
                if r == Ratio::Inf {
                    return Ok(Verdict::Fails { certificate: Certificate::ZeroGap { point: p.clone() }, exact: true });
                }
                if r.cmp(&best) == Ordering::Greater {
                    best = r;
                }
            }
            if kind == DominanceKind::Linear {
                Ok(holds(witness_c(&best, mode), FilterParam::Whole))
            } else {
                // c ≥ max g already gives g ≤ c·f + c
                let mut top = Value::int(1);
                for p in points {
                    top = top.max_value(g.eval(p)?);
                }
                Ok(holds(witness_c(&Ratio::Finite(top), mode), FilterParam::Whole))
            }
        }
        DominanceKind::Asymptotic | DominanceKind::CoAsymptotic => {
            let dim = g.domain().dim();
            let y: Point = (0..dim).map(|j| points.iter().map(|p| p[j]).max().unwrap() + 1).collect();
            let y = y.into_iter().map(|v| v.max(0)).collect();
            Ok(holds(Q::one(), FilterParam::Threshold(y)))
        }
        DominanceKind::Cofinite => Ok(holds(Q::one(), FilterParam::ExcludedFinite(points.to_vec()))),
        DominanceKind::Trivial => Ok(holds(Q::one(), FilterParam::Empty)),
    }
}

/// Per-doubling growth factor that counts as unbounded when it repeats.
pub const SUSTAINED_GROWTH: (i64, i64) = (19, 10);

fn grew(a: &Ratio, b: &Ratio, factor: &Q, tol: f64) -> bool {
    match (a, b) {
        (Ratio::Inf, _) | (_, Ratio::Zero) => false,
        (_, Ratio::Inf) => true,
        (Ratio::Zero, Ratio::Finite(_)) => false,
        (Ratio::Finite(a), Ratio::Finite(b)) => match (a, b) {
            (Value::Exact(a), Value::Exact(b)) => *b >= a * factor,
            _ => b.to_f64() >= factor.to_f64() * a.to_f64() * (1.0 + tol),
        },
    }
}

/// `c - b ≥ (19/10)·(b - a)` for finite ratios. An unbounded linear ratio
/// doubles its increment per horizon doubling; a bounded one that is still
/// climbing does not.
fn increments_keep_up(a: &Ratio, b: &Ratio, c: &Ratio) -> bool {
    let k = Q::new(SUSTAINED_GROWTH.0, SUSTAINED_GROWTH.1);
    match (a, b, c) {
        (Ratio::Finite(a), Ratio::Finite(b), Ratio::Finite(c)) => match (a, b, c) {
            (Value::Exact(a), Value::Exact(b), Value::Exact(c)) => &(c - b) >= &(&k * &(b - a)),
            _ => c.to_f64() - b.to_f64() >= k.to_f64() * (b.to_f64() - a.to_f64()),
        },
        _ => false,
    }
}

struct Sampled {
    points: Vec<Point>,
    ratios: Vec<Ratio>,
    in_h: Vec<bool>,
    in_half: Vec<bool>,
    in_quarter: Vec<bool>,
}

struct CandidateEval {
    filter: FilterParam,
    eligible: bool,
    r_half: Ratio,
    arg_half: Option<usize>,
    r_h: Ratio,
    arg_h: Option<usize>,
    r_2h: Ratio,
    arg_2h: Option<usize>,
    inf_h: usize,
    inf_2h: usize,
    /// Sups over the shells `(h/4, h/2]`, `(h/2, h]` and `(h, 2h]`, so that
    /// values near the origin do not mask a trend.
    shells: [Ratio; 3],
    shell_args: [Option<usize>; 3],
}

impl CandidateEval {
    fn run(s: &Sampled, filter: FilterParam, eligible: bool, member: impl Fn(usize) -> bool) -> CandidateEval {
        let mut c = CandidateEval {
            filter,
            eligible,
            r_half: Ratio::Zero,
            arg_half: None,
            r_h: Ratio::Zero,
            arg_h: None,
            r_2h: Ratio::Zero,
            arg_2h: None,
            inf_h: 0,
            inf_2h: 0,
            shells: [Ratio::Zero, Ratio::Zero, Ratio::Zero],
            shell_args: [None; 3],
        };
        for i in 0..s.points.len() {
            if !member(i) {
                continue;
            }
            let r = &s.ratios[i];
            if *r == Ratio::Inf {
                c.inf_2h += 1;
                if s.in_h[i] {
                    c.inf_h += 1;
                }
            }
            if r.cmp(&c.r_2h) == Ordering::Greater {
                c.r_2h = r.clone();
                c.arg_2h = Some(i);
            }
            if s.in_h[i] && r.cmp(&c.r_h) == Ordering::Greater {
                c.r_h = r.clone();
                c.arg_h = Some(i);
            }
            if s.in_half[i] && r.cmp(&c.r_half) == Ordering::Greater {
                c.r_half = r.clone();
                c.arg_half = Some(i);
            }
            let shell = if !s.in_h[i] {
                2
            } else if !s.in_half[i] {
                1
            } else if !s.in_quarter[i] {
                0
            } else {
                continue;
            };
            if r.cmp(&c.shells[shell]) == Ordering::Greater {
                c.shells[shell] = r.clone();
                c.shell_args[shell] = Some(i);
            }
        }
        c
    }

    /// Over the three shells the ratio doubles in the last step, or grows by
    /// at least [`SUSTAINED_GROWTH`] in both steps, or grows by half in both
    /// while the increments nearly double. The last two rules catch linear
    /// growth with an additive offset.
    fn doubled(&self, tol: f64) -> bool {
        let sustained = Q::new(SUSTAINED_GROWTH.0, SUSTAINED_GROWTH.1);
        let half = Q::new(3, 2);
        let [a, b, c] = &self.shells;
        grew(b, c, &Q::int(2), tol)
            || (grew(a, b, &sustained, tol) && grew(b, c, &sustained, tol))
            || (grew(a, b, &half, tol) && grew(b, c, &half, tol) && increments_keep_up(a, b, c))
    }

    fn grows(&self) -> bool {
        self.inf_2h > self.inf_h
    }

    fn stable(&self, tol: f64) -> bool {
        self.inf_2h == 0 && !self.doubled(tol)
    }

    fn evidence(&self, tol: f64) -> bool {
        self.grows() || self.doubled(tol)
    }
}

fn threshold_values(h: u64) -> Vec<i64> {
    let mut v = vec![0i64];
    let mut p = 1i64;
    while (p as u64) * 2 <= h {
        v.push(p);
        p *= 2;
    }
    v
}

fn all_tuples(values: &[i64], dim: usize) -> Vec<Point> {
    let mut out: Vec<Point> = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|t| {
                values.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Decide `g ⪯ f` on a grid by sampling the boxes at `horizon` and
/// `2·horizon`. Finite domains are delegated to [`decide_finite`].
pub fn decide_at_horizon(
    kind: DominanceKind,
    g: &ResourceFunction,
    f: &ResourceFunction,
    horizon: u64,
    c_max: &Q,
) -> Result<Verdict> {
    shared_domain(g, f)?;
    if g.domain().is_finite() {
        return decide_finite(kind, g, f);
    }
    if horizon == 0 {
        return Err(Error::Invalid("horizon must be positive".into()));
    }
    let h = horizon;
    if kind == DominanceKind::Trivial {
        return Ok(Verdict::Holds { witness: Witness { c: Q::one(), filter: FilterParam::Empty }, horizon: Some(h) });
    }
    let mode = g.mode().join(f.mode());
    let tol = mode.rel_tol();
    let domain = g.domain();
    let points = domain.points_in_box(2 * h)?;
    let hi = h as i64;
    let lo = domain.base().map_or(0, |b| b.lower(hi));
    let mut ratios = Vec::with_capacity(points.len());
    let half = hi / 2;
    let lo_half = domain.base().map_or(0, |b| b.lower(half));
    let mut in_h = Vec::with_capacity(points.len());
    let mut in_half = Vec::with_capacity(points.len());
    let quarter = hi / 4;
    let lo_quarter = domain.base().map_or(0, |b| b.lower(quarter));
    let mut in_quarter = Vec::with_capacity(points.len());
    for p in &points {
        ratios.push(Ratio::of(kind, &g.eval(p)?, &f.eval(p)?));
        in_h.push(p.iter().all(|&v| v >= lo && v <= hi));
        in_half.push(p.iter().all(|&v| v >= lo_half && v <= half));
        in_quarter.push(p.iter().all(|&v| v >= lo_quarter && v <= quarter));
    }
    let s = Sampled { points, ratios, in_h, in_half, in_quarter };

    if kind == DominanceKind::Linear {
        if let Some(i) = s.ratios.iter().position(|r| *r == Ratio::Inf) {
            return Ok(Verdict::Fails {
                certificate: Certificate::ZeroGap { point: s.points[i].clone() },
                exact: true,
            });
        }
    }

    let cands: Vec<CandidateEval> = match kind {
        DominanceKind::Linear | DominanceKind::Affine => {
            vec![CandidateEval::run(&s, FilterParam::Whole, true, |_| true)]
        }
        DominanceKind::Asymptotic | DominanceKind::CoAsymptotic => {
            let any = kind == DominanceKind::CoAsymptotic;
            all_tuples(&threshold_values(h), domain.dim())
                .into_iter()
                .map(|y| {
                    let member = |i: usize| {
                        let p = &s.points[i];
                        if any {
                            p.iter().zip(&y).any(|(a, b)| a >= b)
                        } else {
                            p.iter().zip(&y).all(|(a, b)| a >= b)
                        }
                    };
                    let filter = FilterParam::Threshold(y.clone());
                    CandidateEval::run(&s, filter, true, member)
                })
                .collect()
        }
        DominanceKind::Cofinite => cofinite_candidates(&s),
        DominanceKind::Trivial => unreachable!(),
    };

    // excluding the top points lowers r_h, which can hide growth; the
    // trend of the zero-gap-only candidate has to be stable as well
    let trend_ok = kind != DominanceKind::Cofinite || cands.first().is_some_and(|c| !c.doubled(tol));
    let best = cands
        .iter()
        .filter(|c| trend_ok && c.eligible && c.stable(tol))
        .filter(|c| c.r_h.value().is_some_and(|v| v.le_tol(&Value::Exact(c_max.clone()), tol)))
        .fold(None::<&CandidateEval>, |acc, c| match acc {
            Some(b) if c.r_h.cmp(&b.r_h) != Ordering::Less => Some(b),
            _ => Some(c),
        });
    if let Some(b) = best {
        return Ok(Verdict::Holds {
            witness: Witness { c: witness_c(&b.r_h, mode), filter: b.filter.clone() },
            horizon: Some(h),
        });
    }

    // a candidate with a zero gap inside its filter set can never hold, so it
    // does not block a failure another candidate gives evidence for
    let evidence = cands.iter().rev().find(|c| c.evidence(tol));
    if let Some(c) = evidence.filter(|_| cands.iter().all(|c| c.evidence(tol) || c.inf_h > 0)) {
        let certificate = if c.grows() {
            Certificate::InfiniteBadSet {
                predicate: "f = 0 < g".into(),
                h1: h,
                count1: c.inf_h,
                h2: 2 * h,
                count2: c.inf_2h,
            }
        } else if kind == DominanceKind::Affine {
            let worst: Vec<Point> = c.arg_2h.into_iter().map(|i| s.points[i].clone()).collect();
            Certificate::AffineGap { points: worst, c_max: c_max.clone() }
        } else {
            let pick = |arg: Option<usize>| arg.map_or_else(Vec::new, |i| s.points[i].clone());
            Certificate::UnboundedRatio {
                p1: pick(c.shell_args[0]),
                r1: c.shells[0].value().unwrap_or(Value::int(0)),
                h1: h / 2,
                p2: pick(c.shell_args[2]),
                r2: c.shells[2].value().unwrap_or(Value::int(0)),
                h2: 2 * h,
            }
        };
        return Ok(Verdict::Fails { certificate, exact: false });
    }

    let max_ratio = cands
        .iter()
        .filter(|c| c.eligible)
        .map(|c| &c.r_h)
        .min_by(|a, b| a.cmp(b))
        .and_then(Ratio::value);
    Ok(Verdict::Unknown { max_ratio, horizon: h })
}

fn cofinite_candidates(s: &Sampled) -> Vec<CandidateEval> {
    let zero_gaps: Vec<usize> = (0..s.points.len()).filter(|&i| s.in_h[i] && s.ratios[i] == Ratio::Inf).collect();
    let mut excluded = vec![false; s.points.len()];
    for &i in &zero_gaps {
        excluded[i] = true;
    }
    let listed = |ex: &[bool]| -> Vec<Point> {
        (0..s.points.len()).filter(|&i| ex[i]).map(|i| s.points[i].clone()).collect()
    };
    if zero_gaps.len() > EXCLUDED_BUDGET {
        let filter = FilterParam::ExcludedFinite(listed(&excluded));
        return vec![CandidateEval::run(s, filter, false, |i| !excluded[i])];
    }
    let mut order: Vec<usize> = (0..s.points.len())
        .filter(|&i| s.in_h[i] && matches!(s.ratios[i], Ratio::Finite(_)))
        .collect();
    order.sort_by(|&a, &b| s.ratios[b].cmp(&s.ratios[a]).then(a.cmp(&b)));
    let mut out = Vec::new();
    let extra = EXCLUDED_BUDGET - zero_gaps.len();
    for k in 0..=extra.min(order.len()) {
        if k > 0 {
            excluded[order[k - 1]] = true;
        }
        let filter = FilterParam::ExcludedFinite(listed(&excluded));
        let ex = excluded.clone();
        out.push(CandidateEval::run(s, filter, true, move |i| !ex[i]));
    }
    out
}

/// Decide on whichever kind of domain `g` and `f` share.
pub fn decide(kind: DominanceKind, g: &ResourceFunction, f: &ResourceFunction, horizon: u64, c_max: &Q) -> Result<Verdict> {
    if g.domain().is_finite() {
        decide_finite(kind, g, f)
    } else {
        decide_at_horizon(kind, g, f, horizon, c_max)
    }
}

/// Compare `f` against `g` through both legs `f ⪯ g` and `g ⪯ f`.
pub fn compare(
    kind: DominanceKind,
    f: &ResourceFunction,
    g: &ResourceFunction,
    horizon: u64,
    c_max: &Q,
) -> Result<(Comparison, Verdict, Verdict)> {
    let fg = decide(kind, f, g, horizon, c_max)?;
    let gf = decide(kind, g, f, horizon, c_max)?;
    let cmp = match (&fg, &gf) {
        (Verdict::Unknown { .. }, _) | (_, Verdict::Unknown { .. }) => Comparison::Unknown,
        (Verdict::Holds { .. }, Verdict::Holds { .. }) => Comparison::Equivalent,
        (Verdict::Holds { .. }, Verdict::Fails { .. }) => Comparison::StrictlyLess,
        (Verdict::Fails { .. }, Verdict::Holds { .. }) => Comparison::StrictlyGreater,
        (Verdict::Fails { .. }, Verdict::Fails { .. }) => Comparison::Incomparable,
    };
    Ok((cmp, fg, gf))
}

/// True if the point lies in the witness's filter set.
pub fn in_filter(kind: DominanceKind, filter: &FilterParam, p: &[i64]) -> bool {
    match filter {
        FilterParam::Whole => true,
        FilterParam::Empty => false,
        FilterParam::Threshold(y) => {
            if kind == DominanceKind::CoAsymptotic {
                p.iter().zip(y).any(|(a, b)| a >= b)
            } else {
                p.iter().zip(y).all(|(a, b)| a >= b)
            }
        }
        FilterParam::ExcludedFinite(a) => !a.iter().any(|q| q.as_slice() == p),
    }
}

/// Check `g ≤ c·f` (affine: `g ≤ c·f + c`) on the filter set within the box
/// at `horizon` (all points of a finite domain).
pub fn replay_witness(
    kind: DominanceKind,
    g: &ResourceFunction,
    f: &ResourceFunction,
    witness: &Witness,
    horizon: u64,
) -> Result<Option<Point>> {
    shared_domain(g, f)?;
    let tol = g.mode().join(f.mode()).rel_tol();
    let c = Value::Exact(witness.c.clone());
    for p in g.domain().points_in_box(horizon)? {
        if !in_filter(kind, &witness.filter, &p) {
            continue;
        }
        let mut rhs = c.mul(&f.eval(&p)?);
        if kind == DominanceKind::Affine {
            rhs = rhs.add(&c);
        }
        if !g.eval(&p)?.le_tol(&rhs, tol) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Replay a Holds verdict at its own horizon; other verdicts pass trivially.
pub fn replay(kind: DominanceKind, g: &ResourceFunction, f: &ResourceFunction, v: &Verdict) -> Result<bool> {
    match v {
        Verdict::Holds { witness, horizon } => Ok(replay_witness(kind, g, f, witness, horizon.unwrap_or(0))?.is_none()),
        _ => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse_function;
    use crate::parse::parse_domain;

    fn fx(d: &str, e: &str) -> ResourceFunction {
        parse_function(&parse_domain(d).unwrap(), e).unwrap()
    }

    #[test]
    fn linear_finite_max_ratio() {
        let g = fx("finite:[1,2,3,4,5,6,7,8,9,10]", "n");
        let f = fx("finite:[1,2,3,4,5,6,7,8,9,10]", "1");
        let v = decide_finite(DominanceKind::Linear, &g, &f).unwrap();
        assert_eq!(v.witness().unwrap().c, Q::int(10));
    }

    #[test]
    fn linear_grid_unbounded() {
        let g = fx("N", "n");
        let f = fx("N", "1");
        let v = decide_at_horizon(DominanceKind::Linear, &g, &f, 1024, &default_c_max()).unwrap();
        assert!(matches!(v, Verdict::Fails { certificate: Certificate::UnboundedRatio { .. }, exact: false }));
    }

    #[test]
    fn scaling_holds() {
        let g = fx("N", "2*n");
        let f = fx("N", "n");
        let v = decide_at_horizon(DominanceKind::Linear, &g, &f, 256, &default_c_max()).unwrap();
        assert_eq!(v.witness().unwrap().c, Q::int(2));
        assert!(replay(DominanceKind::Linear, &g, &f, &v).unwrap());
    }

    #[test]
    fn threshold_is_first_minimal() {
        let g = fx("N^2", "(3*n+1)*(1-sgn(m))+4");
        let f = fx("N^2", "1");
        let v = decide_at_horizon(DominanceKind::Asymptotic, &g, &f, 64, &default_c_max()).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.filter, FilterParam::Threshold(vec![1, 0]));
        assert_eq!(w.c, Q::int(4));
    }
}
