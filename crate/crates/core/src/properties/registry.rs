//! Fixed counterexamples with their expected verdict patterns.

use serde::{Deserialize, Serialize};

use crate::dominance::{compare, decide, decide_at_horizon, default_c_max, Certificate, Comparison, DominanceKind, FilterParam, Verdict};
use crate::error::{Error, Result};
use crate::expr::FuncExpr;
use crate::func::{combine, parse_function, transform, CoordMap, ResourceFunction, TransformOp, Value};
use crate::num::Q;
use crate::parse::{parse_domain, parse_expr};

use DominanceKind::*;

pub const CASE_IDS: [&str; 9] = [
    "howell-subset-sum",
    "even-zero-subcomp",
    "strip-N2-isubcomp",
    "negatives-Z-isubcomp",
    "affine-subhom",
    "affine-superhom",
    "affine-zero",
    "mn-vs-mn-plus-n",
    "alg-strip-cost",
];

pub fn registry_ids() -> &'static [&'static str] {
    &CASE_IDS
}

/// Build a function from domain and body text.
pub fn fx(domain: &str, body: &str) -> Result<ResourceFunction> {
    parse_function(&parse_domain(domain)?, body)
}

fn map1(dim: usize, coords: &[&str]) -> Result<CoordMap> {
    Ok(CoordMap::Exprs(coords.iter().map(|c| parse_expr(c, dim)).collect::<Result<_>>()?))
}

pub struct EvenZero {
    pub g: ResourceFunction,
    pub g_hat: ResourceFunction,
    /// Sends even inputs to 0 and fixes odd ones.
    pub map: CoordMap,
}

pub fn even_zero() -> Result<EvenZero> {
    Ok(EvenZero {
        g: fx("N", "n")?,
        g_hat: fx("N", "n + ind(n = 0)")?,
        map: map1(1, &["n*(n - 2*floor(1/2*n))"])?,
    })
}

/// A constant-time algorithm on a domain, whose cost blows up on a thin set.
pub struct ThinSet {
    pub f: ResourceFunction,
    pub one: ResourceFunction,
    /// The linear bound the algorithm meets.
    pub bound: ResourceFunction,
    /// Injective map from `N` onto the thin set.
    pub map: CoordMap,
}

pub fn strip_n2() -> Result<ThinSet> {
    Ok(ThinSet {
        f: fx("N^2", "(3*n + 1)*(1 - sgn(m)) + 4")?,
        one: fx("N^2", "1")?,
        bound: fx("N^2", "n*(1 - sgn(m)) + 1")?,
        map: map1(1, &["0", "n"])?,
    })
}

pub fn negatives_z() -> Result<ThinSet> {
    Ok(ThinSet {
        f: fx("Z", "if(n < 0, -3*n + 5, 4)")?,
        one: fx("Z", "1")?,
        bound: fx("Z", "max(-1*n, 1)")?,
        map: map1(1, &["-1*n - 1"])?,
    })
}

pub struct Howell {
    pub g: ResourceFunction,
    pub g_hat: ResourceFunction,
}

pub fn howell() -> Result<Howell> {
    Ok(Howell { g: fx("N^2", "m*n")?, g_hat: fx("N^2", "if(m = 0, exp(2, n), m*n)")? })
}

/// Prefix sum over the first coordinate: `(m, n) ↦ Σ_{i ≤ m} φ(i, n)`.
pub fn howell_sum(phi: &ResourceFunction) -> Result<ResourceFunction> {
    let body = phi.expr().ok_or_else(|| Error::Invalid("expression body required".into()))?;
    let e = FuncExpr::SubsetSum {
        count: Box::new(FuncExpr::add(FuncExpr::coord(1), FuncExpr::int(1))),
        weight: Box::new(FuncExpr::int(1)),
        map: vec![FuncExpr::Index, FuncExpr::coord(2)],
        body: Box::new(body.clone()),
    };
    crate::func::expr_function(phi.domain().clone(), e, phi.mode())
}

pub struct AffineSubHom {
    /// The multiplier.
    pub u: ResourceFunction,
    pub f: ResourceFunction,
    /// Member of `O(f)` whose multiple escapes `O(u·f)`.
    pub g: ResourceFunction,
}

pub fn affine_subhom() -> Result<AffineSubHom> {
    Ok(AffineSubHom { u: fx("N+", "n")?, f: fx("N+", "pow(n, -1)")?, g: fx("N+", "1")? })
}

pub struct AffineSuperHom {
    pub u: ResourceFunction,
    pub f: ResourceFunction,
    pub h_hat: ResourceFunction,
}

pub fn affine_superhom() -> Result<AffineSuperHom> {
    Ok(AffineSuperHom { u: fx("N", "0")?, f: fx("N", "1")?, h_hat: fx("N", "1")? })
}

/// Operation count of the plane algorithm: init, assignment, test, loop,
/// return; a loop of `k` rounds costs `3k + 1`.
pub fn plane_ops(m: u64, n: u64) -> u64 {
    let mut ops = 1 + 1 + 1;
    if m == 0 {
        let mut i = 0;
        loop {
            ops += 1; // loop test
            if i == n {
                break;
            }
            ops += 2; // increment of j and of the counter
            i += 1;
        }
    }
    ops + 1
}

/// Same for the integer algorithm, which loops `-z` times when `z < 0`.
pub fn integer_ops(z: i64) -> u64 {
    if z < 0 {
        plane_ops(0, z.unsigned_abs())
    } else {
        plane_ops(1, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub label: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub checks: Vec<CheckLine>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Want {
    Holds,
    FailsExact,
    FailsEvidence,
}

impl Want {
    fn label(self) -> &'static str {
        match self {
            Want::Holds => "holds",
            Want::FailsExact => "fails (exact)",
            Want::FailsEvidence => "fails (evidence)",
        }
    }

    fn matches(self, v: &Verdict) -> bool {
        match self {
            Want::Holds => v.holds(),
            Want::FailsExact => v.is_exact_fail(),
            Want::FailsEvidence => matches!(v, Verdict::Fails { exact: false, .. }),
        }
    }
}

struct Case {
    id: &'static str,
    checks: Vec<CheckLine>,
    c_max: Q,
}

impl Case {
    fn new(id: &'static str) -> Case {
        Case { id, checks: Vec::new(), c_max: default_c_max() }
    }

    fn line(&mut self, label: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, ok: bool) {
        self.checks.push(CheckLine { label: label.into(), expected: expected.into(), observed: observed.into(), ok });
    }

    fn verdict(
        &mut self,
        label: &str,
        kind: DominanceKind,
        g: &ResourceFunction,
        f: &ResourceFunction,
        h: u64,
        want: Want,
    ) -> Result<Verdict> {
        let v = decide(kind, g, f, h, &self.c_max)?;
        let ok = want.matches(&v);
        self.line(format!("{label} [{kind}, h={h}]"), want.label(), v.to_string(), ok);
        Ok(v)
    }

    fn done(self) -> CaseResult {
        CaseResult { id: self.id.to_string(), checks: self.checks }
    }
}

fn compose(f: &ResourceFunction, map: &CoordMap, source: &str) -> Result<ResourceFunction> {
    transform(f, TransformOp::ComposeRight { map: map.clone(), source: parse_domain(source)? })
}

fn mul(a: &ResourceFunction, b: &ResourceFunction) -> Result<ResourceFunction> {
    combine(&FuncExpr::mul(FuncExpr::slot(0), FuncExpr::slot(1)), &[a, b])
}

/// Largest ratio `a/b` over box points with every coordinate ≥ 1.
fn interior_max_ratio(a: &ResourceFunction, b: &ResourceFunction, h: u64) -> Result<Value> {
    let mut best = Value::int(0);
    for p in a.domain().points_in_box(h)? {
        if p.iter().any(|&v| v < 1) {
            continue;
        }
        let den = b.eval(&p)?;
        if den.is_zero() {
            continue;
        }
        best = best.max_value(a.eval(&p)?.div(&den));
    }
    Ok(best)
}

fn howell_case() -> Result<CaseResult> {
    let mut c = Case::new("howell-subset-sum");
    let Howell { g, g_hat } = howell()?;
    let (tg, tgh) = (howell_sum(&g)?, howell_sum(&g_hat)?);
    let mut bad = None;
    for m in 0..=8i64 {
        for n in 0..=8i64 {
            let want = Q::int(1i64 << n) + Q::new(m * (m + 1) * n, 2);
            if tgh.eval_q(&[m, n])? != want {
                bad = Some((m, n));
            }
        }
    }
    c.line("summed ĝ equals 2^n + m(m+1)n/2 on m,n ≤ 8", "equal", format!("{bad:?}"), bad.is_none());
    let v = tgh.eval_q(&[2, 3])?;
    c.line("summed ĝ at (2,3)", "17", v.to_string(), v == Q::int(17));
    c.verdict("ĝ ⪯ g", Asymptotic, &g_hat, &g, 64, Want::Holds)?;
    let lin = c.verdict("ĝ ⪯ g", Linear, &g_hat, &g, 64, Want::FailsExact)?;
    let at_origin = matches!(&lin, Verdict::Fails { certificate: Certificate::ZeroGap { point }, .. } if point == &vec![0, 0]);
    c.line("linear zero gap location", "(0,0)", lin.to_string(), at_origin);
    for h in [32, 64] {
        let v = decide_at_horizon(Asymptotic, &tgh, &tg, h, &c.c_max)?;
        let ok = matches!(v, Verdict::Fails { exact: false, .. });
        c.line(format!("Σĝ ⪯ Σg [asymptotic, h={h}]"), Want::FailsEvidence.label(), v.to_string(), ok);
    }
    let r32 = interior_max_ratio(&tgh, &tg, 32)?;
    let r128 = interior_max_ratio(&tgh, &tg, 128)?;
    let grows = r128.to_f64() >= 2.0 * r32.to_f64();
    c.line("ratio growth from h=32 to h=128", "≥ 2×", format!("{r32:.6} → {r128:.6}"), grows);
    Ok(c.done())
}

fn even_zero_case() -> Result<CaseResult> {
    let mut c = Case::new("even-zero-subcomp");
    let EvenZero { g, g_hat, map } = even_zero()?;
    let (gs, ghs) = (compose(&g, &map, "N")?, compose(&g_hat, &map, "N")?);
    for kind in [Cofinite, Asymptotic, CoAsymptotic] {
        c.verdict("f̂ ⪯ f", kind, &g_hat, &g, 256, Want::Holds)?;
        let v = c.verdict("f̂∘s ⪯ f∘s", kind, &ghs, &gs, 256, Want::FailsEvidence)?;
        let bad_set = matches!(v, Verdict::Fails { certificate: Certificate::InfiniteBadSet { .. }, .. });
        c.line(format!("bad set grows [{kind}]"), "infinite bad set", v.to_string(), bad_set);
    }
    let v = c.verdict("f̂ ⪯ f", Linear, &g_hat, &g, 256, Want::FailsExact)?;
    let zero_gap = matches!(v, Verdict::Fails { certificate: Certificate::ZeroGap { .. }, .. });
    c.line("linear detects the gap at 0", "zero gap", v.to_string(), zero_gap);
    Ok(c.done())
}

fn strip_case() -> Result<CaseResult> {
    let mut c = Case::new("strip-N2-isubcomp");
    let ThinSet { f, one, bound, map } = strip_n2()?;
    let v = c.verdict("f ⪯ 1", Asymptotic, &f, &one, 64, Want::Holds)?;
    let thr = matches!(v.witness(), Some(w) if w.filter == FilterParam::Threshold(vec![1, 0]));
    c.line("asymptotic threshold", "(1,0)", v.to_string(), thr);
    c.verdict("f ⪯ n(1-sgn m)+1", Linear, &f, &bound, 64, Want::Holds)?;
    let (fs, os) = (compose(&f, &map, "N")?, compose(&one, &map, "N")?);
    let mut bad = None;
    for n in 0..=16 {
        if fs.eval_q(&[n])? != Q::int(3 * n + 5) {
            bad = Some(n);
        }
    }
    c.line("f∘s equals (3n+1)+4", "equal", format!("{bad:?}"), bad.is_none());
    c.verdict("f∘s ⪯ 1", Asymptotic, &fs, &os, 256, Want::FailsEvidence)?;
    c.verdict("f∘s ⪯ n+1", Linear, &fs, &fx("N", "n + 1")?, 256, Want::Holds)?;
    Ok(c.done())
}

fn negatives_case() -> Result<CaseResult> {
    let mut c = Case::new("negatives-Z-isubcomp");
    let ThinSet { f, one, bound, map } = negatives_z()?;
    let mut bad = None;
    for z in -16..=16 {
        if f.eval_q(&[z])? != Q::int(integer_ops(z) as i64) {
            bad = Some(z);
        }
    }
    c.line("cost matches the operation count on [-16,16]", "equal", format!("{bad:?}"), bad.is_none());
    for kind in [CoAsymptotic, Asymptotic] {
        c.verdict("f ⪯ 1", kind, &f, &one, 256, Want::Holds)?;
    }
    c.verdict("f ⪯ max(-z,1)", Linear, &f, &bound, 256, Want::Holds)?;
    let (fs, os) = (compose(&f, &map, "N")?, compose(&one, &map, "N")?);
    for kind in [CoAsymptotic, Asymptotic] {
        c.verdict("f∘s ⪯ 1", kind, &fs, &os, 256, Want::FailsEvidence)?;
    }
    Ok(c.done())
}

fn affine_subhom_case() -> Result<CaseResult> {
    let mut c = Case::new("affine-subhom");
    let AffineSubHom { u, f, g } = affine_subhom()?;
    for cc in [1i64, 2, 4] {
        let n = 3 * cc;
        let lhs = u.eval_q(&[n])?;
        let rhs = Q::int(cc) * u.eval_q(&[n])? * f.eval_q(&[n])? + Q::int(cc);
        c.line(format!("u(⌈3c⌉) > c·u·f + c at c={cc}"), ">", format!("{lhs} vs {rhs}"), lhs > rhs);
    }
    c.verdict("1 ⪯ 1/n", Affine, &g, &f, 256, Want::Holds)?;
    c.verdict("n·1 ⪯ n·(1/n)", Affine, &mul(&u, &g)?, &mul(&u, &f)?, 256, Want::FailsEvidence)?;
    c.verdict("1 ⪯ 1/n", Linear, &g, &f, 256, Want::FailsEvidence)?;
    Ok(c.done())
}

fn affine_superhom_case() -> Result<CaseResult> {
    let mut c = Case::new("affine-superhom");
    let AffineSuperHom { u, f, h_hat } = affine_superhom()?;
    let uf = mul(&u, &f)?;
    c.verdict("ĥ ⪯ u·f", Affine, &h_hat, &uf, 256, Want::Holds)?;
    // u vanishes, so every u·ĝ is 0 while ĥ is 1
    let (a, b) = (uf.eval_q(&[0])?, h_hat.eval_q(&[0])?);
    c.line("u·ĝ at 0 vs ĥ at 0", "0 ≠ 1", format!("{a} vs {b}"), u.sample(16)?.iter().all(|(_, v)| v.is_zero()) && a != b);
    c.verdict("ĥ ⪯ u·f", Linear, &h_hat, &uf, 256, Want::FailsExact)?;
    Ok(c.done())
}

fn affine_zero_case() -> Result<CaseResult> {
    let mut c = Case::new("affine-zero");
    let (one, zero) = (fx("N+", "1")?, fx("N+", "0")?);
    let (cmp, _, _) = compare(Affine, &one, &zero, 256, &c.c_max)?;
    c.line("1 vs 0 [affine]", "equivalent", cmp.label(), cmp == Comparison::Equivalent);
    c.verdict("1 ⪯ 0", Linear, &one, &zero, 256, Want::FailsExact)?;
    c.verdict("0 ⪯ 1", Linear, &zero, &one, 256, Want::Holds)?;
    Ok(c.done())
}

fn mn_case() -> Result<CaseResult> {
    let mut c = Case::new("mn-vs-mn-plus-n");
    let (f, g) = (fx("N^2", "m*n")?, fx("N^2", "m*n + n")?);
    let v = c.verdict("mn+n ⪯ mn", Linear, &g, &f, 64, Want::FailsExact)?;
    let at = matches!(&v, Verdict::Fails { certificate: Certificate::ZeroGap { point }, .. } if point == &vec![0, 1]);
    c.line("zero gap location", "(0,1)", v.to_string(), at);
    c.verdict("mn ⪯ mn+n", Linear, &f, &g, 64, Want::Holds)?;
    let (fd, gd) = (fx("N^2 where m >= 1", "m*n")?, fx("N^2 where m >= 1", "m*n + n")?);
    let (cmp, _, _) = compare(Linear, &fd, &gd, 64, &c.c_max)?;
    c.line("on m ≥ 1", "equivalent", cmp.label(), cmp == Comparison::Equivalent);
    Ok(c.done())
}

fn strip_cost_case() -> Result<CaseResult> {
    let mut c = Case::new("alg-strip-cost");
    let ThinSet { f, one, bound, .. } = strip_n2()?;
    let mut bad = None;
    for m in 0..=16i64 {
        for n in 0..=16i64 {
            if f.eval_q(&[m, n])? != Q::int(plane_ops(m as u64, n as u64) as i64) {
                bad = Some((m, n));
            }
        }
    }
    c.line("closed form matches the operation count on [0,16]^2", "equal", format!("{bad:?}"), bad.is_none());
    let (v, w) = (f.eval_q(&[1, 5])?, f.eval_q(&[0, 5])?);
    c.line("cost at (1,5) and (0,5)", "4, 20", format!("{v}, {w}"), v == Q::int(4) && w == Q::int(20));
    c.verdict("f ⪯ 1", Asymptotic, &f, &one, 64, Want::Holds)?;
    for kind in [Linear, Cofinite, CoAsymptotic] {
        c.verdict("f ⪯ n(1-sgn m)+1", kind, &f, &bound, 64, Want::Holds)?;
        c.verdict("f ⪯ 1", kind, &f, &one, 64, Want::FailsEvidence)?;
    }
    Ok(c.done())
}

/// Execute a registry case and record every expected verdict.
pub fn run_counterexample(id: &str) -> Result<CaseResult> {
    match id {
        "howell-subset-sum" => howell_case(),
        "even-zero-subcomp" => even_zero_case(),
        "strip-N2-isubcomp" => strip_case(),
        "negatives-Z-isubcomp" => negatives_case(),
        "affine-subhom" => affine_subhom_case(),
        "affine-superhom" => affine_superhom_case(),
        "affine-zero" => affine_zero_case(),
        "mn-vs-mn-plus-n" => mn_case(),
        "alg-strip-cost" => strip_cost_case(),
        _ => Err(Error::UnknownCase(id.to_string())),
    }
}
