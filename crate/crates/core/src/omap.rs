//! Transforms of resource functions that preserve linear dominance
//! (`g ⪯ f ⟹ T(g) ⪯ T(f)`), and the stronger law where a right inverse
//! `T̂` turns `g ≤ c·T(f)` into `T̂(g) ≤ d·f`.
//!
//! All checks run on random finite instances, where linear dominance is
//! decided exactly.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::dominance::{decide_finite, replay_witness, DominanceKind, FilterParam, Verdict, Witness};
use crate::error::{fmt_point, Error, Point, Result};
use crate::expr::{Env, EvalError, FuncExpr};
use crate::func::{combine, transform, CoordMap, Mode, Pointwise, ResourceFunction, TransformOp, Value};
use crate::num::{approx_le, Q};
use crate::properties::gen::{trial_rng, Gen};
use crate::properties::InstanceGen;

const FLOAT_TOL: f64 = 1e-9;

/// Index coordinates `y ↦ Σ_{i < count(y)} weight(y, i) · f(map(y, i))`.
/// `map` and `weight` see the summation index as `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSumSpec {
    /// Finite domain `Y` of the result.
    pub source: DomainSpec,
    /// Domain `X` of the argument.
    pub target: DomainSpec,
    pub count: FuncExpr,
    pub map: Vec<FuncExpr>,
    pub weight: FuncExpr,
}

impl SubsetSumSpec {
    /// The index set `{(y, i) : i < count(y)}` with each entry's image and
    /// weight, checked against both domains.
    pub fn index_set(&self) -> Result<Vec<(Point, i64, Point, Q)>> {
        let ys = self.source.finite_points().ok_or_else(|| mismatch("subset-sum needs a finite index domain"))?;
        if self.map.len() != self.target.dim() {
            return Err(mismatch("map lands in the wrong dimension"));
        }
        let mut out = vec![];
        for y in ys {
            let c: Vec<Q> = y.iter().map(|&v| Q::int(v)).collect();
            let n = self.count.eval(&Env { coords: &c, slots: &[], index: None })?;
            let n = n.to_i64().filter(|v| *v >= 0 && n.is_integer()).ok_or_else(|| EvalError::NotInteger(n.to_string()))?;
            for i in 0..n {
                let env = Env { coords: &c, slots: &[], index: Some(i) };
                let w = self.weight.eval(&env)?;
                if w.is_negative() {
                    return Err(Error::NegativeValue(y.clone()));
                }
                let x = self
                    .map
                    .iter()
                    .map(|m| {
                        let v = m.eval(&env)?;
                        v.to_i64().filter(|_| v.is_integer()).ok_or(EvalError::NotInteger(v.to_string()))
                    })
                    .collect::<std::result::Result<Point, _>>()?;
                if !self.target.contains(&x)? {
                    return Err(Error::RangeEscape(y.clone()));
                }
                out.push((y.clone(), i, x, w));
            }
        }
        Ok(out)
    }
}

type CustomFn = dyn Fn(&ResourceFunction) -> Result<ResourceFunction> + Send + Sync;

/// A user transform between two declared domains; `None` on both sides
/// means it keeps whatever domain it is given.
#[derive(Clone)]
pub struct CustomTransform {
    pub name: String,
    pub source: Option<DomainSpec>,
    pub target: Option<DomainSpec>,
    pub apply: Arc<CustomFn>,
}

impl fmt::Debug for CustomTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.source, &self.target) {
            (Some(s), Some(t)) => write!(f, "Custom({}: {s} -> {t})", self.name),
            _ => write!(f, "Custom({})", self.name),
        }
    }
}

#[derive(Debug, Clone)]
pub enum OTransform {
    /// `f ↦ f + α`.
    Translate(Q),
    /// `f ↦ f ∘ s` for `s: source → target`.
    ComposeRight { map: CoordMap, source: DomainSpec, target: DomainSpec },
    /// `f ↦ α·f`.
    ScaleBy(Q),
    /// `f ↦ f^α`.
    PowerBy(Q),
    SubsetSum(SubsetSumSpec),
    Custom(CustomTransform),
}

fn mismatch(m: &str) -> Error {
    Error::TransformDomainMismatch(m.into())
}

impl OTransform {
    pub fn name(&self) -> String {
        match self {
            OTransform::Translate(a) => format!("translate({a})"),
            OTransform::ComposeRight { .. } => "compose-right".into(),
            OTransform::ScaleBy(a) => format!("scale({a})"),
            OTransform::PowerBy(a) => format!("power({a})"),
            OTransform::SubsetSum(_) => "subset-sum".into(),
            OTransform::Custom(c) => c.name.clone(),
        }
    }

    /// Domain functions must live on, when the transform fixes one.
    pub fn input_domain(&self) -> Option<&DomainSpec> {
        match self {
            OTransform::ComposeRight { target, .. } => Some(target),
            OTransform::SubsetSum(s) => Some(&s.target),
            OTransform::Custom(c) => c.source.as_ref(),
            _ => None,
        }
    }

    pub fn output_domain(&self) -> Option<&DomainSpec> {
        match self {
            OTransform::ComposeRight { source, .. } => Some(source),
            OTransform::SubsetSum(s) => Some(&s.source),
            OTransform::Custom(c) => c.target.as_ref(),
            _ => None,
        }
    }

    pub fn apply(&self, f: &ResourceFunction) -> Result<ResourceFunction> {
        if let Some(d) = self.input_domain() {
            if f.domain() != d {
                return Err(Error::TransformDomainMismatch(format!("{} expects {d}, got {}", self.name(), f.domain())));
            }
        }
        match self {
            OTransform::Translate(a) => {
                if a.is_negative() {
                    return Err(Error::Invalid("translation must be non-negative".into()));
                }
                combine(&FuncExpr::add(FuncExpr::slot(0), FuncExpr::Const(a.clone())), &[f])
            }
            OTransform::ScaleBy(a) => transform(f, TransformOp::Pointwise(Pointwise::Scale(a.clone()))),
            OTransform::PowerBy(a) => power(f, a),
            OTransform::ComposeRight { map, source, .. } => {
                transform(f, TransformOp::ComposeRight { map: map.clone(), source: source.clone() }).map_err(|e| match e {
                    Error::DomainMismatch(m) => Error::TransformDomainMismatch(m),
                    Error::RangeEscape(p) => Error::TransformDomainMismatch(format!("map leaves the domain at {}", fmt_point(&p))),
                    e => e,
                })
            }
            OTransform::SubsetSum(s) => {
                let index = s.index_set()?;
                let mode = f.mode();
                ResourceFunction::tabulate(s.source.clone(), mode, |y| {
                    let mut acc = Value::int(0);
                    for (_, _, x, w) in index.iter().filter(|r| r.0 == y) {
                        acc = acc.add(&Value::Exact(w.clone()).mul(&f.eval(x)?));
                    }
                    Ok(acc)
                })
            }
            OTransform::Custom(c) => {
                let out = (c.apply)(f)?;
                if out.domain() != c.target.as_ref().unwrap_or(f.domain()) {
                    return Err(Error::TransformDomainMismatch(format!("{} produced a function on {}", c.name, out.domain())));
                }
                Ok(out)
            }
        }
    }

    /// Witness constant for `T(g) ⪯ T(f)` built from one for `g ⪯ f`.
    pub fn mapped_witness(&self, c: &Q) -> Option<Q> {
        match self {
            OTransform::Translate(_) => Some(c.clone().max(Q::one())),
            OTransform::ComposeRight { .. } | OTransform::SubsetSum(_) | OTransform::ScaleBy(_) => Some(c.clone()),
            OTransform::PowerBy(a) => Some(pow_up(c, a)),
            OTransform::Custom(_) => None,
        }
    }

    /// `T̂ = f ↦ max(f - α, 0)`, the only non-negative candidate inverse of
    /// a translation.
    pub fn untranslate(alpha: Q) -> OTransform {
        let apply = move |f: &ResourceFunction| {
            combine(&FuncExpr::max(FuncExpr::sub(FuncExpr::slot(0), FuncExpr::Const(alpha.clone())), FuncExpr::int(0)), &[f])
        };
        OTransform::Custom(CustomTransform {
            name: "untranslate".into(),
            source: None,
            target: None,
            apply: Arc::new(apply),
        })
    }

    /// Push a function on `source` forward along an injective table map
    /// into `target`, with zeros off the image.
    pub fn zero_extension(map: CoordMap, source: DomainSpec, target: DomainSpec) -> Result<OTransform> {
        let CoordMap::Table(rows) = &map else {
            return Err(Error::Invalid("zero extension needs a table map".into()));
        };
        let rows = rows.clone();
        let mut seen: Vec<&Point> = rows.iter().map(|r| &r.1).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("zero extension needs an injective map".into()));
        }
        let tgt = target.clone();
        let apply = move |g: &ResourceFunction| {
            ResourceFunction::tabulate(tgt.clone(), g.mode(), |x| match rows.iter().find(|r| r.1 == x) {
                Some((y, _)) => g.eval(y),
                None => Ok(Value::int(0)),
            })
        };
        Ok(OTransform::Custom(CustomTransform {
            name: "zero-extension".into(),
            source: Some(source),
            target: Some(target),
            apply: Arc::new(apply),
        }))
    }
}

/// Smallest float-safe rational at or above `c^a`.
fn pow_up(c: &Q, a: &Q) -> Q {
    c.pow_rational(a).unwrap_or_else(|| {
        let v = c.to_f64().powf(a.to_f64()) * (1.0 + 1e-9);
        Q::from_f64(v).unwrap_or_else(|| Q::int(v.ceil() as i64))
    })
}

/// `f^α` pointwise; float mode when some value has no rational root.
fn power(f: &ResourceFunction, a: &Q) -> Result<ResourceFunction> {
    if !a.is_positive() {
        return Err(Error::Invalid("power must be positive".into()));
    }
    if !f.domain().is_finite() {
        let f = if a.is_integer() { f.clone() } else { f.with_mode(Mode::float())? };
        return transform(&f, TransformOp::Pointwise(Pointwise::Pow(a.clone())));
    }
    let exact = f.domain().finite_points().unwrap().iter().all(|p| match f.eval(p) {
        Ok(Value::Exact(v)) => v.pow_rational(a).is_some(),
        _ => false,
    });
    if exact {
        ResourceFunction::tabulate(f.domain().clone(), Mode::Exact, |p| {
            Ok(Value::Exact(f.eval_q(p)?.pow_rational(a).unwrap()))
        })
    } else {
        ResourceFunction::tabulate(f.domain().clone(), Mode::float(), |p| {
            Ok(Value::Float(f.eval(p)?.to_f64().powf(a.to_f64())))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    OMapping,
    OEquality,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::OMapping => "o-mapping",
            Law::OEquality => "o-equality",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum OStatus {
    Passed,
    /// The law held but the constructed constant was too small.
    WitnessFailed { trial: usize, detail: String },
    LawFailed { trial: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OReport {
    pub transform: String,
    pub law: Law,
    pub trials: usize,
    pub inconclusive: usize,
    #[serde(flatten)]
    pub status: OStatus,
    pub failing_instance_ref: Option<String>,
}

impl OReport {
    pub fn passed(&self) -> bool {
        self.status == OStatus::Passed
    }

    fn fail(mut self, status: OStatus) -> OReport {
        if let OStatus::WitnessFailed { trial, .. } | OStatus::LawFailed { trial, .. } = &status {
            self.failing_instance_ref = Some(format!("trial-{trial}"));
        }
        self.status = status;
        self
    }
}

/// Stream tag separating transform checks from property cells.
const OMAP_STREAM: usize = 1000;

/// A random finite domain of 1-D points when the transform leaves it open.
fn random_domain(rng: &mut ChaCha8Rng) -> DomainSpec {
    let size = rng.gen_range(1..=24usize);
    let mut pts: Vec<i64> = (-10..=30).collect();
    pts.shuffle(rng);
    pts.truncate(size);
    DomainSpec::finite(pts.into_iter().map(|v| vec![v]).collect()).unwrap()
}

fn linear_c(g: &ResourceFunction, f: &ResourceFunction) -> Result<Option<Q>> {
    Ok(match decide_finite(DominanceKind::Linear, g, f)? {
        Verdict::Holds { witness, .. } => Some(witness.c),
        _ => None,
    })
}

fn replay_c(g: &ResourceFunction, f: &ResourceFunction, c: Q) -> Result<Option<Point>> {
    replay_witness(DominanceKind::Linear, g, f, &Witness { c, filter: FilterParam::Whole }, 0)
}

/// Sample `g ⪯ f` on the transform's input domain and check
/// `T(g) ⪯ T(f)` with the constructed constant.
pub fn check_o_mapping(t: &OTransform, gen: &InstanceGen) -> Result<OReport> {
    let mut report = OReport {
        transform: t.name(),
        law: Law::OMapping,
        trials: 0,
        inconclusive: 0,
        status: OStatus::Passed,
        failing_instance_ref: None,
    };
    if let Some(d) = t.input_domain() {
        if !d.is_finite() {
            return Err(mismatch("instances need a finite input domain"));
        }
    }
    for trial in 0..gen.trials {
        let mut rng = trial_rng(gen.seed, OMAP_STREAM, 0, trial);
        let domain = t.input_domain().cloned().unwrap_or_else(|| random_domain(&mut rng));
        let mut g_ = Gen::new(rng, domain);
        let f = g_.base_function();
        let g = g_.dominated(DominanceKind::Linear, &f);
        report.trials += 1;
        let Some(c) = linear_c(&g, &f)? else {
            report.inconclusive += 1;
            continue;
        };
        let (tg, tf) = (t.apply(&g)?, t.apply(&f)?);
        let law = linear_c(&tg, &tf)?;
        let witness = t.mapped_witness(&c).or_else(|| law.clone());
        let bad = match &witness {
            Some(w) => replay_c(&tg, &tf, w.clone())?,
            None => None,
        };
        match (law, bad) {
            (None, _) => {
                return Ok(report.fail(OStatus::LawFailed { trial, detail: format!("T(g) is not dominated by T(f); g ≤ {c}·f") }))
            }
            (Some(_), Some(p)) => {
                let detail = format!("constant {} fails at {}", witness.unwrap(), fmt_point(&p));
                return Ok(report.fail(OStatus::WitnessFailed { trial, detail }));
            }
            _ => {}
        }
    }
    Ok(report)
}

/// Inverse constant `d` for `g ≤ c·T(f) ⟺ T̂(g) ≤ d·f`.
fn inverse_constant(t: &OTransform, c: &Q) -> Value {
    match t {
        OTransform::PowerBy(a) => match c.pow_rational(&a.recip()) {
            Some(v) => Value::Exact(v),
            None => Value::Float(c.to_f64().powf(1.0 / a.to_f64())),
        },
        _ => Value::Exact(c.clone()),
    }
}

fn bounded_by(g: &ResourceFunction, c: &Value, f: &ResourceFunction) -> Result<bool> {
    for p in g.domain().finite_points().ok_or(Error::NotFinite)? {
        let (gv, fv) = (g.eval(p)?, c.mul(&f.eval(p)?));
        let ok = match (&gv, &fv) {
            (Value::Exact(a), Value::Exact(b)) => a <= b,
            _ => approx_le(gv.to_f64(), fv.to_f64(), FLOAT_TOL),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_values(a: &ResourceFunction, b: &ResourceFunction) -> Result<Option<Point>> {
    for p in a.domain().finite_points().ok_or(Error::NotFinite)? {
        if !a.eval(p)?.eq_tol(&b.eval(p)?, FLOAT_TOL) {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}

/// Check that `t_hat` is a right inverse of `t` and that the two
/// inequalities correspond under the constructed constants.
pub fn check_o_equality(t: &OTransform, t_hat: &OTransform, gen: &InstanceGen) -> Result<OReport> {
    let mut report = OReport {
        transform: t.name(),
        law: Law::OEquality,
        trials: 0,
        inconclusive: 0,
        status: OStatus::Passed,
        failing_instance_ref: None,
    };
    for trial in 0..gen.trials {
        let mut rng = trial_rng(gen.seed, OMAP_STREAM + 1, 0, trial);
        let shared = random_domain(&mut rng);
        let x_dom = t.input_domain().cloned().unwrap_or_else(|| shared.clone());
        let y_dom = t.output_domain().cloned().unwrap_or(shared);
        let mut gx = Gen::new(rng.clone(), x_dom);
        let f = gx.base_function();
        let g_on_y = Gen::new(trial_rng(gen.seed, OMAP_STREAM + 2, 0, trial), y_dom).base_function();
        report.trials += 1;
        let back = t_hat.apply(&g_on_y).map_err(|e| match e {
            Error::NegativeValue(p) => Error::RightInverseViolated(format!("trial {trial}: T̂(g) negative at {}", fmt_point(&p))),
            e => e,
        })?;
        if let Some(p) = same_values(&t.apply(&back)?, &g_on_y)? {
            return Err(Error::RightInverseViolated(format!("trial {trial}: T(T̂(g)) differs from g at {}", fmt_point(&p))));
        }
        let tf = t.apply(&f)?;
        let Some(c_star) = linear_c(&g_on_y, &tf)? else {
            report.inconclusive += 1;
            continue;
        };
        let c_rand = Q::new(rng.gen_range(1..=64), rng.gen_range(1..=16));
        for c in [c_star.clone(), &c_star * &Q::new(1, 2), c_rand] {
            if !c.is_positive() {
                continue;
            }
            let lhs = bounded_by(&g_on_y, &Value::Exact(c.clone()), &tf)?;
            let d = inverse_constant(t, &c);
            let rhs = bounded_by(&back, &d, &f)?;
            if lhs != rhs {
                let detail = format!("g ≤ {c}·T(f) is {lhs} but T̂(g) ≤ {d}·f is {rhs}");
                return Ok(report.fail(OStatus::LawFailed { trial, detail }));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn gen(trials: usize) -> InstanceGen {
        InstanceGen { trials, ..Default::default() }
    }

    fn chain(n: i64) -> DomainSpec {
        DomainSpec::finite((0..n).map(|v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn translate_is_a_mapping() {
        let r = check_o_mapping(&OTransform::Translate(Q::int(3)), &gen(100)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.trials, 100);
    }

    #[test]
    fn translate_has_no_inverse() {
        let t = OTransform::Translate(Q::int(3));
        let err = check_o_equality(&t, &OTransform::untranslate(Q::int(3)), &gen(20)).unwrap_err();
        assert!(matches!(err, Error::RightInverseViolated(_)), "{err:?}");
    }

    #[test]
    fn compose_right_is_a_mapping() {
        let map = CoordMap::Table((0..5).map(|y| (vec![y], vec![(3 * y) % 7])).collect());
        let t = OTransform::ComposeRight { map, source: chain(5), target: chain(7) };
        assert!(check_o_mapping(&t, &gen(50)).unwrap().passed());
    }

    #[test]
    fn subset_sum_is_a_mapping() {
        let spec = SubsetSumSpec {
            source: chain(4),
            target: chain(6),
            count: parse_expr("n + 1", 1).unwrap(),
            map: vec![parse_expr("i + 1", 1).unwrap()],
            weight: parse_expr("1/2", 1).unwrap(),
        };
        assert_eq!(spec.index_set().unwrap().len(), 1 + 2 + 3 + 4);
        assert!(check_o_mapping(&OTransform::SubsetSum(spec), &gen(50)).unwrap().passed());
    }

    #[test]
    fn strong_equalities() {
        let pairs = [
            (OTransform::PowerBy(Q::int(2)), OTransform::PowerBy(Q::new(1, 2))),
            (OTransform::ScaleBy(Q::int(3)), OTransform::ScaleBy(Q::new(1, 3))),
        ];
        for (t, t_hat) in pairs {
            let r = check_o_equality(&t, &t_hat, &gen(60)).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(check_o_mapping(&t, &gen(60)).unwrap().passed());
        }
        let rows: Vec<(Point, Point)> = (0..4).map(|y| (vec![y], vec![2 * y + 1])).collect();
        let (src, tgt) = (chain(4), chain(9));
        let t = OTransform::ComposeRight { map: CoordMap::Table(rows.clone()), source: src.clone(), target: tgt.clone() };
        let t_hat = OTransform::zero_extension(CoordMap::Table(rows), src, tgt).unwrap();
        assert!(check_o_equality(&t, &t_hat, &gen(60)).unwrap().passed());
    }

    #[test]
    fn domain_mismatch() {
        let map = CoordMap::Table(vec![(vec![0], vec![0])]);
        let t = OTransform::ComposeRight { map, source: chain(1), target: chain(2) };
        let f = ResourceFunction::tabulate(chain(3), Mode::Exact, |_| Ok(Value::int(1))).unwrap();
        assert!(matches!(t.apply(&f), Err(Error::TransformDomainMismatch(_))));
    }
}
