//! Non-negative resource functions on integer-tuple domains.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Point, Result};
use crate::expr::{Env, EvalError, FuncExpr};
use crate::num::{Q, DEFAULT_REL_TOL};

/// Horizon used to sample grid domains when validating a body.
pub const CHECK_HORIZON_1D: u64 = 64;
pub const CHECK_HORIZON_2D: u64 = 24;
pub const CHECK_HORIZON_ND: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Float { rel_tol: f64 },
}

impl Mode {
    pub fn float() -> Mode {
        Mode::Float { rel_tol: DEFAULT_REL_TOL }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }

    /// Float wins: combining an exact and a float function yields float.
    pub fn join(self, other: Mode) -> Mode {
        match (self, other) {
            (Mode::Exact, Mode::Exact) => Mode::Exact,
            (Mode::Float { rel_tol: a }, Mode::Float { rel_tol: b }) => Mode::Float { rel_tol: a.max(b) },
            (Mode::Float { rel_tol }, _) | (_, Mode::Float { rel_tol }) => Mode::Float { rel_tol },
        }
    }

    pub fn rel_tol(self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Float { rel_tol } => rel_tol,
        }
    }
}

/// A function value: exact rational or float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn int(i: i64) -> Value {
        Value::Exact(Q::int(i))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64(),
            Value::Float(x) => *x,
        }
    }

    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_negative(),
            Value::Float(x) => *x < 0.0,
        }
    }

    pub fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + o.to_f64()),
        }
    }

    pub fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * o.to_f64()),
        }
    }

    /// `self / o`; `o` must be nonzero.
    pub fn div(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            _ => Value::Float(self.to_f64() / o.to_f64()),
        }
    }

    pub fn cmp_value(&self, o: &Value) -> Ordering {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&o.to_f64()).unwrap_or(Ordering::Equal),
        }
    }

    /// `self ≤ o`, with relative slack `tol` when either side is a float.
    pub fn le_tol(&self, o: &Value, tol: f64) -> bool {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => a <= b,
            _ => crate::num::approx_le(self.to_f64(), o.to_f64(), tol),
        }
    }

    pub fn eq_tol(&self, o: &Value, tol: f64) -> bool {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => crate::num::approx_eq(self.to_f64(), o.to_f64(), tol),
        }
    }

    pub fn max_value(self, o: Value) -> Value {
        if o.cmp_value(&self) == Ordering::Greater {
            o
        } else {
            self
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// How a function's values are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Body {
    /// Values aligned with the sorted points of a finite domain.
    Table(Vec<Value>),
    Expr(FuncExpr),
}

/// Input body for [`make_function`].
#[derive(Debug, Clone)]
pub enum BodySpec {
    Table(Vec<(Point, Value)>),
    Expr(FuncExpr),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceFunction {
    domain: DomainSpec,
    body: Body,
    mode: Mode,
}

pub fn check_horizon(dim: usize) -> u64 {
    match dim {
        1 => CHECK_HORIZON_1D,
        2 => CHECK_HORIZON_2D,
        _ => CHECK_HORIZON_ND,
    }
}

/// Build a function, checking totality and non-negativity: exhaustively on
/// finite domains and on the sample box for grids.
pub fn make_function(domain: DomainSpec, body: BodySpec, mode: Mode) -> Result<ResourceFunction> {
    let body = match body {
        BodySpec::Expr(e) => {
            if e.arity() > domain.dim() {
                return Err(Error::DomainMismatch(format!(
                    "body uses x{} but the domain has dimension {}",
                    e.arity(),
                    domain.dim()
                )));
            }
            if e.slot_count() > 0 {
                return Err(Error::Invalid("body contains unbound operand slots".into()));
            }
            if mode.is_exact() && e.any(&|n| matches!(n, FuncExpr::Log(..))) {
                return Err(Error::InexactBody("log in exact mode".into()));
            }
            Body::Expr(e)
        }
        BodySpec::Table(mut rows) => {
            let Some(points) = domain.finite_points() else {
                return Err(Error::NotFinite);
            };
            rows.sort_by(|a, b| a.0.cmp(&b.0));
            if rows.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Invalid("table lists a point twice".into()));
            }
            if let Some(p) = points.iter().find(|p| rows.binary_search_by(|r| r.0.cmp(p)).is_err()) {
                return Err(Error::PartialFunction(p.clone(), "no table entry".into()));
            }
            if rows.len() != points.len() {
                let extra = rows.iter().find(|r| domain.index_of(&r.0).is_none()).unwrap();
                return Err(Error::DomainMismatch(format!(
                    "table entry {} lies outside the domain",
                    crate::error::fmt_point(&extra.0)
                )));
            }
            let vals = rows
                .into_iter()
                .map(|(_, v)| match (mode, v) {
                    (Mode::Exact, Value::Float(x)) => Q::from_f64(x)
                        .map(Value::Exact)
                        .ok_or_else(|| Error::InexactBody(format!("table value {x}"))),
                    (Mode::Float { .. }, Value::Exact(q)) => Ok(Value::Float(q.to_f64())),
                    (_, v) => Ok(v),
                })
                .collect::<Result<Vec<_>>>()?;
            Body::Table(vals)
        }
    };
    let f = ResourceFunction { domain, body, mode };
    f.validate()?;
    Ok(f)
}

/// Convenience: parse-free construction from an expression.
pub fn expr_function(domain: DomainSpec, e: FuncExpr, mode: Mode) -> Result<ResourceFunction> {
    make_function(domain, BodySpec::Expr(e), mode)
}

/// Parse `text` over the domain's dimension and build an exact function,
/// falling back to float mode when the body needs it.
pub fn parse_function(domain: &DomainSpec, text: &str) -> Result<ResourceFunction> {
    let e = crate::parse::parse_expr(text, domain.dim())?;
    match expr_function(domain.clone(), e.clone(), Mode::Exact) {
        Err(Error::InexactBody(_)) => expr_function(domain.clone(), e, Mode::float()),
        other => other,
    }
}

fn map_eval_err(p: &[i64], e: EvalError) -> Error {
    match e {
        EvalError::Irrational(m) => Error::InexactBody(format!("{m} at {}", crate::error::fmt_point(p))),
        other => Error::PartialFunction(p.to_vec(), other.to_string()),
    }
}

impl ResourceFunction {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn expr(&self) -> Option<&FuncExpr> {
        match &self.body {
            Body::Expr(e) => Some(e),
            Body::Table(_) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let h = check_horizon(self.domain.dim());
        for p in self.domain.points_in_box(h)? {
            let v = self.eval(&p)?;
            if v.is_negative() {
                return Err(Error::NegativeValue(p));
            }
            if let Value::Float(x) = v {
                if !x.is_finite() {
                    return Err(Error::PartialFunction(p, format!("non-finite value {x}")));
                }
            }
        }
        Ok(())
    }

    /// Value at a point assumed to lie in the domain.
    pub fn eval(&self, p: &[i64]) -> Result<Value> {
        match &self.body {
            Body::Table(vals) => self
                .domain
                .index_of(p)
                .map(|i| vals[i].clone())
                .ok_or_else(|| Error::DomainMismatch(format!("{} not in domain", crate::error::fmt_point(p)))),
            Body::Expr(e) => match self.mode {
                Mode::Exact => {
                    let c: Vec<Q> = p.iter().map(|&v| Q::int(v)).collect();
                    e.eval(&Env { coords: &c, slots: &[], index: None })
                        .map(Value::Exact)
                        .map_err(|err| map_eval_err(p, err))
                }
                Mode::Float { .. } => {
                    let c: Vec<f64> = p.iter().map(|&v| v as f64).collect();
                    e.eval(&Env { coords: &c, slots: &[], index: None })
                        .map(Value::Float)
                        .map_err(|err| map_eval_err(p, err))
                }
            },
        }
    }

    /// Exact value at a point; errors in float mode.
    pub fn eval_q(&self, p: &[i64]) -> Result<Q> {
        match self.eval(p)? {
            Value::Exact(q) => Ok(q),
            Value::Float(x) => Err(Error::InexactBody(format!("float value {x}"))),
        }
    }

    /// Domain points in the sample box with their values (all points for a
    /// finite domain), lexicographically ordered.
    pub fn sample(&self, horizon: u64) -> Result<Vec<(Point, Value)>> {
        self.domain
            .points_in_box(horizon)?
            .into_iter()
            .map(|p| {
                let v = self.eval(&p)?;
                Ok((p, v))
            })
            .collect()
    }

    /// Same values as a table over a finite domain.
    pub fn to_table(&self) -> Result<ResourceFunction> {
        let pts = self.domain.finite_points().ok_or(Error::NotFinite)?;
        let vals = pts.iter().map(|p| self.eval(p)).collect::<Result<Vec<_>>>()?;
        Ok(ResourceFunction { domain: self.domain.clone(), body: Body::Table(vals), mode: self.mode })
    }

    /// Evaluate `f` on every point of a finite domain to build a table.
    pub fn tabulate(domain: DomainSpec, mode: Mode, f: impl Fn(&[i64]) -> Result<Value>) -> Result<ResourceFunction> {
        let pts = domain.finite_points().ok_or(Error::NotFinite)?;
        let rows = pts.iter().map(|p| Ok((p.clone(), f(p)?))).collect::<Result<Vec<_>>>()?;
        make_function(domain, BodySpec::Table(rows), mode)
    }

    pub fn with_mode(&self, mode: Mode) -> Result<ResourceFunction> {
        match &self.body {
            Body::Expr(e) => expr_function(self.domain.clone(), e.clone(), mode),
            Body::Table(_) => {
                let rows = self.sample(0)?;
                make_function(self.domain.clone(), BodySpec::Table(rows), mode)
            }
        }
    }
}

impl fmt::Display for ResourceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Expr(e) => write!(f, "{e} on {}", self.domain),
            Body::Table(v) => write!(f, "table[{}] on {}", v.len(), self.domain),
        }
    }
}

/// A map `s: Y → X` given by coordinate expressions over Y or by a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoordMap {
    Exprs(Vec<FuncExpr>),
    Table(Vec<(Point, Point)>),
}

impl CoordMap {
    pub fn apply(&self, y: &[i64]) -> Result<Point> {
        match self {
            CoordMap::Exprs(es) => {
                let c: Vec<Q> = y.iter().map(|&v| Q::int(v)).collect();
                es.iter()
                    .map(|e| {
                        let v = e
                            .eval(&Env { coords: &c, slots: &[], index: None })
                            .map_err(|err| map_eval_err(y, err))?;
                        v.to_i64()
                            .filter(|_| v.is_integer())
                            .ok_or_else(|| Error::RangeEscape(y.to_vec()))
                    })
                    .collect()
            }
            CoordMap::Table(rows) => rows
                .iter()
                .find(|r| r.0 == y)
                .map(|r| r.1.clone())
                .ok_or_else(|| Error::DomainMismatch(format!("map undefined at {}", crate::error::fmt_point(y)))),
        }
    }

    pub fn target_dim(&self) -> Option<usize> {
        match self {
            CoordMap::Exprs(es) => Some(es.len()),
            CoordMap::Table(rows) => rows.first().map(|r| r.1.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pointwise {
    Add(ResourceFunction),
    Mul(ResourceFunction),
    Max(ResourceFunction),
    Min(ResourceFunction),
    Scale(Q),
    Pow(Q),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformOp {
    Restrict(DomainSpec),
    /// `f ∘ s` for `s: source → domain(f)`.
    ComposeRight { map: CoordMap, source: DomainSpec },
    Pointwise(Pointwise),
}

fn check_subdomain(sub: &DomainSpec, sup: &DomainSpec) -> Result<()> {
    if sub.dim() != sup.dim() {
        return Err(Error::DomainMismatch(format!("dimension {} vs {}", sub.dim(), sup.dim())));
    }
    if let (DomainSpec::Grid { base: b1, .. }, DomainSpec::Grid { base: b2, .. }) = (sub, sup) {
        if !b1.subset_of(*b2) {
            return Err(Error::DomainMismatch(format!("{sub} is not inside {sup}")));
        }
    }
    if sub.is_finite() || !sup.is_finite() {
        for p in sub.points_in_box(check_horizon(sub.dim()))? {
            if !sup.contains(&p)? {
                return Err(Error::DomainMismatch(format!(
                    "{} is outside {sup}",
                    crate::error::fmt_point(&p)
                )));
            }
        }
        Ok(())
    } else {
        Err(Error::DomainMismatch("a grid is not a subset of a finite domain".into()))
    }
}

/// Restriction, right composition, or a pointwise combination.
pub fn transform(f: &ResourceFunction, op: TransformOp) -> Result<ResourceFunction> {
    match op {
        TransformOp::Restrict(sub) => {
            check_subdomain(&sub, &f.domain)?;
            match &f.body {
                Body::Expr(e) => expr_function(sub, e.clone(), f.mode),
                Body::Table(_) => ResourceFunction::tabulate(sub, f.mode, |p| f.eval(p)),
            }
        }
        TransformOp::ComposeRight { map, source } => {
            if map.target_dim().is_some_and(|d| d != f.domain.dim()) {
                return Err(Error::DomainMismatch("map lands in the wrong dimension".into()));
            }
            for y in source.points_in_box(check_horizon(source.dim()))? {
                let x = map.apply(&y)?;
                if !f.domain.contains(&x)? {
                    return Err(Error::RangeEscape(y));
                }
            }
            match (&f.body, &map) {
                (Body::Expr(e), CoordMap::Exprs(es)) if !source.is_finite() => {
                    expr_function(source, e.subst_coords(es), f.mode)
                }
                _ if source.is_finite() => ResourceFunction::tabulate(source, f.mode, |y| f.eval(&map.apply(y)?)),
                _ => Err(Error::DomainMismatch("table maps need a finite source".into())),
            }
        }
        TransformOp::Pointwise(pw) => {
            let (template, others): (FuncExpr, Vec<&ResourceFunction>) = match &pw {
                Pointwise::Add(g) => (FuncExpr::add(FuncExpr::slot(0), FuncExpr::slot(1)), vec![g]),
                Pointwise::Mul(g) => (FuncExpr::mul(FuncExpr::slot(0), FuncExpr::slot(1)), vec![g]),
                Pointwise::Max(g) => (FuncExpr::max(FuncExpr::slot(0), FuncExpr::slot(1)), vec![g]),
                Pointwise::Min(g) => (FuncExpr::min(FuncExpr::slot(0), FuncExpr::slot(1)), vec![g]),
                Pointwise::Scale(a) => {
                    if !a.is_positive() {
                        return Err(Error::Invalid("scale factor must be positive".into()));
                    }
                    (FuncExpr::scale(a.clone(), FuncExpr::slot(0)), vec![])
                }
                Pointwise::Pow(a) => {
                    if !a.is_positive() {
                        return Err(Error::Invalid("power must be positive".into()));
                    }
                    (FuncExpr::pow(FuncExpr::slot(0), a.clone()), vec![])
                }
            };
            let mut args = vec![f];
            args.extend(others);
            combine(&template, &args)
        }
    }
}

/// Evaluate the template with `$k` bound to the value of `args[k]`.
/// Grid arguments with expression bodies are substituted symbolically;
/// finite domains are tabulated.
pub fn combine(template: &FuncExpr, args: &[&ResourceFunction]) -> Result<ResourceFunction> {
    let first = args.first().ok_or_else(|| Error::Invalid("combine needs an operand".into()))?;
    if let Some(a) = args.iter().find(|a| a.domain != first.domain) {
        return Err(Error::DomainMismatch(format!("{} vs {}", first.domain, a.domain)));
    }
    if template.slot_count() > args.len() {
        return Err(Error::Invalid("template references a missing operand".into()));
    }
    let mode = args.iter().fold(Mode::Exact, |m, a| m.join(a.mode));
    let domain = first.domain.clone();
    let exprs: Option<Vec<FuncExpr>> = args.iter().map(|a| a.expr().cloned()).collect();
    match exprs {
        Some(es) if !domain.is_finite() => expr_function(domain, template.subst_slots(&es), mode),
        _ => ResourceFunction::tabulate(domain.clone(), mode, |p| {
            let vals = args.iter().map(|a| a.eval(p)).collect::<Result<Vec<_>>>()?;
            eval_template(template, p, &vals, mode)
        }),
    }
}

/// Evaluate a template at a point given its operand values.
pub fn eval_template(template: &FuncExpr, p: &[i64], vals: &[Value], mode: Mode) -> Result<Value> {
    if mode.is_exact() && vals.iter().all(|v| v.as_q().is_some()) {
        let c: Vec<Q> = p.iter().map(|&v| Q::int(v)).collect();
        let s: Vec<Q> = vals.iter().map(|v| v.as_q().unwrap().clone()).collect();
        template
            .eval(&Env { coords: &c, slots: &s, index: None })
            .map(Value::Exact)
            .map_err(|e| map_eval_err(p, e))
    } else {
        let c: Vec<f64> = p.iter().map(|&v| v as f64).collect();
        let s: Vec<f64> = vals.iter().map(Value::to_f64).collect();
        template
            .eval(&Env { coords: &c, slots: &s, index: None })
            .map(Value::Float)
            .map_err(|e| map_eval_err(p, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_domain, parse_expr};

    fn f_on(domain: &str, body: &str) -> Result<ResourceFunction> {
        let d = parse_domain(domain).unwrap();
        let e = parse_expr(body, d.dim()).unwrap();
        make_function(d, BodySpec::Expr(e), Mode::Exact)
    }

    #[test]
    fn strip_cost_values() {
        let f = f_on("N^2", "(3*n+1)*(1-sgn(m))+4").unwrap();
        assert_eq!(f.eval_q(&[1, 5]).unwrap(), Q::int(4));
        assert_eq!(f.eval_q(&[0, 5]).unwrap(), Q::int(20));
    }

    #[test]
    fn log_at_zero_is_partial() {
        let d = DomainSpec::naturals();
        let e = parse_expr("log(2, n)", 1).unwrap();
        match make_function(d, BodySpec::Expr(e), Mode::float()) {
            Err(Error::PartialFunction(p, _)) => assert_eq!(p, vec![0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_body_rejected() {
        assert!(matches!(f_on("N", "n - 3"), Err(Error::NegativeValue(p)) if p == vec![0]));
    }

    #[test]
    fn compose_with_strip() {
        let f = f_on("N^2", "m*n + n").unwrap();
        let s = CoordMap::Exprs(vec![FuncExpr::int(0), FuncExpr::coord(1)]);
        let g = transform(&f, TransformOp::ComposeRight { map: s, source: DomainSpec::naturals() }).unwrap();
        assert_eq!(g.eval_q(&[7]).unwrap(), Q::int(7));
    }

    #[test]
    fn escape_detected() {
        let f = f_on("N", "n").unwrap();
        let s = CoordMap::Exprs(vec![parse_expr("n - 1", 1).unwrap()]);
        let r = transform(&f, TransformOp::ComposeRight { map: s, source: DomainSpec::naturals() });
        assert!(matches!(r, Err(Error::RangeEscape(p)) if p == vec![0]));
    }
}
