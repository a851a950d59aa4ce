//! Master recurrences over powers of `b`, over reals `x ≥ 1` and over the
//! naturals with ceiling division.
//!
//! The recurrence is `T(n) = a·T(n/b) + F(n)` for `n ≥ b` and `T(n) = d`
//! below `b`; the integer variant divides with `⌈n/b⌉`. The driving term is
//! an expression in `n` evaluated at rational arguments, since `n/b^i` is
//! rarely an integer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::{Env, EvalError, FuncExpr};
use crate::func::Value;
use crate::num::{approx_le, floor_log, Q};
use crate::parse::{parse_expr, parse_rational};

/// Relative tolerance for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Largest prefix `master_theta_class` will evaluate.
pub const MAX_PREFIX: usize = 1 << 20;

/// Allowed change of `c2/c1` when the prefix grows by two exponents.
pub const STABILITY_DRIFT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Powers,
    Reals,
    Integers,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Powers, Variant::Reals, Variant::Integers];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Powers => "powers",
            Variant::Reals => "reals",
            Variant::Integers => "integers",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Recursive,
    Closed,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "recursive" => Ok(Method::Recursive),
            "closed" => Ok(Method::Closed),
            _ => Err(Error::Invalid(format!("unknown method {s:?}"))),
        }
    }
}

fn display_str<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_driving<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<FuncExpr, D::Error> {
    let text = String::deserialize(d)?;
    parse_expr(&text, 1).map_err(serde::de::Error::custom)
}

/// Coefficients of the recurrence plus the driving term and its `Θ(n^c)`
/// bracket `k_lo·n^c ≤ F(n) ≤ k_hi·n^c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterParams {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
    #[serde(serialize_with = "display_str", deserialize_with = "parse_driving")]
    pub driving: FuncExpr,
    pub k_lo: Q,
    pub k_hi: Q,
}

impl MasterParams {
    pub fn new(a: Q, b: Q, c: Q, d: Q, driving: FuncExpr, k_lo: Q, k_hi: Q) -> Result<MasterParams> {
        let bad = |m: &str| Err(Error::Invalid(m.into()));
        if a < Q::one() {
            return bad("a must be at least 1");
        }
        if b <= Q::one() {
            return bad("b must exceed 1");
        }
        if c.is_negative() {
            return bad("c must be non-negative");
        }
        if !d.is_positive() {
            return bad("d must be positive");
        }
        if !k_lo.is_positive() || k_hi < k_lo {
            return bad("bracket needs 0 < k_lo <= k_hi");
        }
        Ok(MasterParams { a, b, c, d, driving, k_lo, k_hi })
    }

    /// Parameters with the driving term given as text in the variable `n`.
    pub fn parse(a: &str, b: &str, c: &str, d: &str, driving: &str, k_lo: &str, k_hi: &str) -> Result<MasterParams> {
        let q = parse_rational;
        MasterParams::new(q(a)?, q(b)?, q(c)?, q(d)?, parse_expr(driving, 1)?, q(k_lo)?, q(k_hi)?)
    }

    /// `F(n) = k·n^c` with a tight bracket.
    pub fn monomial(a: Q, b: Q, c: Q, d: Q, k: Q) -> Result<MasterParams> {
        let driving = FuncExpr::scale(k.clone(), FuncExpr::pow(FuncExpr::coord(1), c.clone()));
        MasterParams::new(a, b, c, d, driving, k.clone(), k)
    }

    fn check_variant(&self, variant: Variant) -> Result<()> {
        if variant == Variant::Integers && self.b < Q::int(2) {
            return Err(Error::Invalid("the integer variant needs b >= 2".into()));
        }
        Ok(())
    }

    /// `F(x)`, exact when the value is rational.
    pub fn driving_at(&self, x: &Q) -> Result<Value> {
        let coords = [x.clone()];
        match self.driving.eval(&Env { coords: &coords, slots: &[], index: None }) {
            Ok(v) => Ok(Value::Exact(v)),
            Err(EvalError::Irrational(_)) => {
                let coords = [x.to_f64()];
                Ok(Value::Float(self.driving.eval(&Env { coords: &coords, slots: &[], index: None })?))
            }
            Err(e) => Err(e.into()),
        }
    }

    /// `F(x)` after checking it against the bracket.
    fn bracketed(&self, x: &Q) -> Result<Value> {
        let v = self.driving_at(x)?;
        let xc = pow_value(x, &self.c);
        let lo = xc.mul(&Value::Exact(self.k_lo.clone()));
        let hi = xc.mul(&Value::Exact(self.k_hi.clone()));
        if !lo.le_tol(&v, FLOAT_TOL) || !v.le_tol(&hi, FLOAT_TOL) {
            return Err(Error::BracketViolated(x.to_string()));
        }
        Ok(v)
    }
}

fn pow_value(x: &Q, r: &Q) -> Value {
    match x.pow_rational(r) {
        Some(q) => Value::Exact(q),
        None => Value::Float(x.to_f64().powf(r.to_f64())),
    }
}

/// The arguments visited by the recurrence from `x`: `x, x/b, …` (with
/// ceilings for integers) down to the first one below `b`.
fn descent(variant: Variant, b: &Q, x: &Q) -> Vec<Q> {
    let mut out = vec![x.clone()];
    let mut y = x.clone();
    while y >= *b {
        y = match variant {
            Variant::Integers => ceil_div(&y, b),
            _ => &y / b,
        };
        out.push(y.clone());
    }
    out
}

fn check_point(variant: Variant, p: &MasterParams, x: &Q) -> Result<()> {
    let reject = || Err(Error::PointNotInDomain(x.to_string()));
    if *x < Q::one() {
        return reject();
    }
    match variant {
        Variant::Powers => {
            // b^m itself divides down to exactly 1
            if *descent(variant, &p.b, x).last().unwrap() != Q::one() {
                return reject();
            }
        }
        Variant::Integers if !x.is_integer() => return reject(),
        _ => {}
    }
    Ok(())
}

/// `T(x)` for one of the three variants, by unrolling the recurrence or by
/// the explicit sum.
pub fn eval_master(variant: Variant, params: &MasterParams, point: &Q, method: Method) -> Result<Value> {
    params.check_variant(variant)?;
    check_point(variant, params, point)?;
    let a = Value::Exact(params.a.clone());
    match method {
        Method::Recursive => {
            let chain = descent(variant, &params.b, point);
            let mut t = Value::Exact(params.d.clone());
            for x in chain[..chain.len() - 1].iter().rev() {
                t = a.mul(&t).add(&params.bracketed(x)?);
            }
            Ok(t)
        }
        Method::Closed => {
            let (m, args): (u32, Vec<Q>) = match variant {
                Variant::Powers | Variant::Reals => {
                    let m = floor_log(&params.b, point);
                    (m, (0..m).map(|i| point / &params.b.powi(i as i64)).collect())
                }
                Variant::Integers => {
                    let m = ceil_count(&params.b, point)?;
                    (m, (0..m).map(|i| ceil_iterate(&params.b, point, i)).collect())
                }
            };
            // over powers n^{log_b a} = a^m
            let mut t = Value::Exact(&params.a.powi(m as i64) * &params.d);
            for (i, x) in args.iter().enumerate() {
                let w = Value::Exact(params.a.powi(i as i64));
                t = t.add(&w.mul(&params.bracketed(x)?));
            }
            Ok(t)
        }
    }
}

/// `⌈x/b⌉`.
pub fn ceil_div(x: &Q, b: &Q) -> Q {
    (x / b).ceil()
}

/// `N^(i)(n)`: `i` nested ceiling divisions, each rounded.
pub fn ceil_iterate(b: &Q, n: &Q, i: u32) -> Q {
    let mut y = n.clone();
    for _ in 0..i {
        y = ceil_div(&y, b);
    }
    y
}

/// `M(n) = min{i : N^(i)(n) < b}`.
pub fn ceil_count(b: &Q, n: &Q) -> Result<u32> {
    let mut y = n.clone();
    let mut i = 0;
    while y >= *b {
        let next = ceil_div(&y, b);
        if next == y {
            return Err(Error::NonTerminating(n.to_string()));
        }
        y = next;
        i += 1;
    }
    Ok(i)
}

/// Naturals `n ≥ 1` with `⌈n/b⌉ = n`, i.e. `n < b/(b-1)`.
pub fn fixed_points(b: &Q) -> Vec<u64> {
    let bound = b / &(b - &Q::one());
    (1u64..).take_while(|&n| Q::int(n as i64) < bound).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeilQuery {
    Iterate { n: u64, i: u32 },
    Count { n: u64 },
    FixedPoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CeilAnswer {
    Value(u64),
    Count(u32),
    FixedPoints(Vec<u64>),
}

impl fmt::Display for CeilAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CeilAnswer::Value(v) => write!(f, "{v}"),
            CeilAnswer::Count(m) => write!(f, "{m}"),
            CeilAnswer::FixedPoints(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

pub fn ceiling_division(b: &Q, query: &CeilQuery) -> Result<CeilAnswer> {
    if *b <= Q::one() {
        return Err(Error::Invalid("b must exceed 1".into()));
    }
    let nat = |n: u64| {
        if n == 0 {
            Err(Error::Invalid("n must be at least 1".into()))
        } else {
            Ok(Q::int(n as i64))
        }
    };
    match *query {
        CeilQuery::Iterate { n, i } => {
            let v = ceil_iterate(b, &nat(n)?, i);
            Ok(CeilAnswer::Value(v.to_i64().unwrap() as u64))
        }
        CeilQuery::Count { n } => Ok(CeilAnswer::Count(ceil_count(b, &nat(n)?)?)),
        CeilQuery::FixedPoints => Ok(CeilAnswer::FixedPoints(fixed_points(b))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub n: u64,
    pub i: Option<u32>,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub b: Q,
    pub n_max: u64,
    pub checked: usize,
    pub violations: Vec<BoundViolation>,
}

impl BoundsReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the additive and multiplicative bounds on `N^(i)(n)` and the
/// bracket `⌊log_b n⌋ ≤ M(n) ≤ ⌊log_b n⌋ + 2` for every `n ≤ n_max`.
pub fn verify_master_bounds(b: &Q, n_max: u64) -> Result<BoundsReport> {
    if *b < Q::int(2) {
        return Err(Error::Invalid("bounds need b >= 2".into()));
    }
    let three_b2 = &Q::int(3) * &(b * b);
    let mut report = BoundsReport { b: b.clone(), n_max, checked: 0, violations: vec![] };
    for n in 1..=n_max {
        let nq = Q::int(n as i64);
        let lg = floor_log(b, &nq);
        let m = ceil_count(b, &nq)?;
        report.checked += 1;
        if m < lg || m > lg + 2 {
            report.violations.push(BoundViolation { n, i: None, bound: format!("M(n) = {m} outside [{lg}, {}]", lg + 2) });
        }
        let mut y = nq.clone();
        for i in 0..=lg + 1 {
            let exact = &nq / &b.powi(i as i64);
            report.checked += 1;
            if y < exact || y >= &exact + &Q::int(2) {
                report.violations.push(BoundViolation { n, i: Some(i), bound: format!("N = {y} not in [n/b^i, n/b^i + 2)") });
            }
            if y >= &three_b2 * &exact {
                report.violations.push(BoundViolation { n, i: Some(i), bound: format!("N = {y} >= 3b^2 n/b^i") });
            }
            y = ceil_div(&y, b);
        }
    }
    Ok(report)
}

/// Which of the three growth rates the recurrence falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaClass {
    /// `log_b a < c`: `n^c`.
    DrivingDominates,
    /// `log_b a = c`: `n^c·log_b n`.
    Balanced,
    /// `log_b a > c`: `n^{log_b a}`.
    LeavesDominate,
}

pub fn theta_class(params: &MasterParams) -> ThetaClass {
    // log_b a vs c  <=>  a vs b^c
    let ord = match params.b.pow_rational(&params.c) {
        Some(bc) => params.a.cmp(&bc),
        None => params.a.to_f64().partial_cmp(&params.b.to_f64().powf(params.c.to_f64())).unwrap(),
    };
    match ord {
        std::cmp::Ordering::Less => ThetaClass::DrivingDominates,
        std::cmp::Ordering::Equal => ThetaClass::Balanced,
        std::cmp::Ordering::Greater => ThetaClass::LeavesDominate,
    }
}

fn power_label(e: &Q) -> String {
    if e.is_zero() {
        "1".into()
    } else if *e == Q::one() {
        "n".into()
    } else {
        format!("pow(n,{e})")
    }
}

/// Reference function in expression syntax, e.g. `pow(n,2)` or `n*log(2,n)`;
/// the label parses back as a one-dimensional expression.
pub fn theta_label(params: &MasterParams) -> String {
    match theta_class(params) {
        ThetaClass::DrivingDominates => power_label(&params.c),
        ThetaClass::Balanced => {
            let log = format!("log({},n)", params.b);
            if params.c.is_zero() {
                log
            } else {
                format!("{}*{log}", power_label(&params.c))
            }
        }
        ThetaClass::LeavesDominate => {
            let k = floor_log(&params.b, &params.a);
            if params.b.powi(k as i64) == params.a {
                power_label(&Q::int(k as i64))
            } else {
                // n^(log_b a) = a^(log_b n)
                format!("exp({},log({},n))", params.a, params.b)
            }
        }
    }
}

fn reference(class: ThetaClass, params: &MasterParams, x: f64) -> f64 {
    let c = params.c.to_f64();
    let b = params.b.to_f64();
    match class {
        ThetaClass::DrivingDominates => x.powf(c),
        ThetaClass::Balanced => x.powf(c) * x.ln() / b.ln(),
        ThetaClass::LeavesDominate => x.powf(params.a.to_f64().ln() / b.ln()),
    }
}

/// `(x, T(x))` over the evaluated prefix: `b^0..b^k` for powers, the
/// quarter grid up to `b^k` for reals and `1..2^k` for integers.
pub fn prefix_values(variant: Variant, params: &MasterParams, horizon_exp: u32) -> Result<Vec<(Q, Value)>> {
    params.check_variant(variant)?;
    let top = params.b.powi(horizon_exp as i64);
    let too_long = |len: f64| {
        if len > MAX_PREFIX as f64 {
            Err(Error::Invalid(format!("prefix of {len} points exceeds {MAX_PREFIX}")))
        } else {
            Ok(())
        }
    };
    match variant {
        Variant::Powers => (0..=horizon_exp)
            .map(|i| {
                let x = params.b.powi(i as i64);
                eval_master(variant, params, &x, Method::Recursive).map(|t| (x, t))
            })
            .collect(),
        Variant::Reals => {
            too_long(4.0 * top.to_f64())?;
            let last = (&top * &Q::int(4)).floor().to_i64().unwrap();
            (4..=last)
                .map(|k| {
                    let x = Q::new(k, 4);
                    eval_master(variant, params, &x, Method::Recursive).map(|t| (x, t))
                })
                .collect()
        }
        Variant::Integers => {
            let n_max = 1u64.checked_shl(horizon_exp).unwrap_or(u64::MAX);
            too_long(n_max as f64)?;
            // T(n) only looks back at ⌈n/b⌉ < n, so fill the table in order
            let mut t: Vec<Value> = vec![Value::int(0)];
            let a = Value::Exact(params.a.clone());
            for n in 1..=n_max {
                let x = Q::int(n as i64);
                let v = if x < params.b {
                    Value::Exact(params.d.clone())
                } else {
                    let prev = ceil_div(&x, &params.b).to_i64().unwrap() as usize;
                    a.mul(&t[prev]).add(&params.bracketed(&x)?)
                };
                t.push(v);
            }
            Ok(t.into_iter().enumerate().skip(1).map(|(n, v)| (Q::int(n as i64), v)).collect())
        }
    }
}

fn bracket_of(class: ThetaClass, params: &MasterParams, values: &[(Q, Value)]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (x, t) in values {
        let r = reference(class, params, x.to_f64());
        if r <= 0.0 {
            continue;
        }
        let q = t.to_f64() / r;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    if !lo.is_finite() || lo <= 0.0 || !hi.is_finite() {
        return Err(Error::BracketSearchFailed("no usable prefix points".into()));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub horizon_exp: u32,
    pub ratio: f64,
    pub extended_exp: u32,
    pub extended_ratio: f64,
    pub drift: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub variant: Variant,
    pub params: MasterParams,
    pub class: ThetaClass,
    pub label: String,
    pub c1: f64,
    pub c2: f64,
    pub stability: Stability,
    /// Points of the extended prefix outside the bracket widened by the
    /// allowed drift.
    pub violations: Vec<String>,
}

/// Classify the recurrence and measure `c1·ref ≤ T ≤ c2·ref` on the prefix
/// at `horizon_exp`, then again two exponents further out.
pub fn master_theta_class(variant: Variant, params: &MasterParams, horizon_exp: u32) -> Result<ThetaReport> {
    if horizon_exp == 0 {
        return Err(Error::Invalid("horizon exponent must be positive".into()));
    }
    let class = theta_class(params);
    let values = prefix_values(variant, params, horizon_exp)?;
    let (c1, c2) = bracket_of(class, params, &values)?;
    let extended = prefix_values(variant, params, horizon_exp + 2)?;
    let (e1, e2) = bracket_of(class, params, &extended)?;
    let (ratio, extended_ratio) = (c2 / c1, e2 / e1);
    let drift = (extended_ratio / ratio - 1.0).abs();
    let mut violations = vec![];
    for (x, t) in &extended {
        let r = reference(class, params, x.to_f64());
        if r <= 0.0 {
            continue;
        }
        let t = t.to_f64();
        let slack = 1.0 + STABILITY_DRIFT;
        if !approx_le(c1 * r / slack, t, FLOAT_TOL) || !approx_le(t, c2 * r * slack, FLOAT_TOL) {
            violations.push(format!("T({x}) = {t} outside [{c1}, {c2}]·ref"));
        }
    }
    Ok(ThetaReport {
        variant,
        params: params.clone(),
        class,
        label: theta_label(params),
        c1,
        c2,
        stability: Stability {
            horizon_exp,
            ratio,
            extended_exp: horizon_exp + 2,
            extended_ratio,
            drift,
            stable: drift < STABILITY_DRIFT,
        },
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn linear(a: i64, b: &str) -> MasterParams {
        MasterParams::parse(&a.to_string(), b, "1", "1", "n", "1", "1").unwrap()
    }

    // independent oracle: plain recursion on f64
    fn oracle(a: f64, b: f64, d: f64, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        if x < b {
            d
        } else {
            a * oracle(a, b, d, f, x / b) + f(x)
        }
    }

    #[test]
    fn t_of_eight() {
        let p = linear(2, "2");
        for m in [Method::Recursive, Method::Closed] {
            assert_eq!(eval_master(Variant::Powers, &p, &q("8"), m).unwrap(), Value::int(32));
        }
        assert_eq!(oracle(2.0, 2.0, 1.0, &|x| x, 8.0), 32.0);
    }

    #[test]
    fn cube_expansion() {
        // F = n^2 + 1 keeps the four terms distinguishable
        let p = MasterParams::parse("3", "2", "2", "5", "n*n + 1", "1", "2").unwrap();
        let f = |x: i64| Q::int(x * x + 1);
        let want = &(&Q::int(27 * 5) + &(&Q::int(9) * &f(2))) + &(&(&Q::int(3) * &f(4)) + &f(8));
        for m in [Method::Recursive, Method::Closed] {
            assert_eq!(eval_master(Variant::Powers, &p, &q("8"), m).unwrap(), Value::Exact(want.clone()));
        }
    }

    #[test]
    fn monomial_driving_term() {
        let p = MasterParams::monomial(Q::int(2), Q::int(3), Q::int(2), Q::int(1), Q::new(1, 2)).unwrap();
        assert_eq!(p.driving_at(&q("6")).unwrap(), Value::int(18));
        let t = eval_master(Variant::Powers, &p, &q("9"), Method::Closed).unwrap();
        assert_eq!(t.to_f64(), oracle(2.0, 3.0, 1.0, &|x| x * x / 2.0, 9.0));
    }

    #[test]
    fn base_case_below_b() {
        let p = linear(3, "2");
        assert_eq!(eval_master(Variant::Reals, &p, &q("7/4"), Method::Closed).unwrap(), Value::int(1));
        assert_eq!(eval_master(Variant::Reals, &p, &q("7/4"), Method::Recursive).unwrap(), Value::int(1));
    }

    #[test]
    fn domain_errors() {
        let p = linear(2, "2");
        assert!(matches!(eval_master(Variant::Powers, &p, &q("6"), Method::Closed), Err(Error::PointNotInDomain(_))));
        assert!(matches!(eval_master(Variant::Integers, &p, &q("5/2"), Method::Closed), Err(Error::PointNotInDomain(_))));
        assert!(matches!(eval_master(Variant::Reals, &p, &q("1/2"), Method::Closed), Err(Error::PointNotInDomain(_))));
        let p = linear(2, "3/2");
        assert!(eval_master(Variant::Integers, &p, &q("5"), Method::Closed).is_err());
    }

    #[test]
    fn bracket_checked() {
        let p = MasterParams::parse("2", "2", "1", "1", "2*n", "1", "1").unwrap();
        assert!(matches!(eval_master(Variant::Powers, &p, &q("4"), Method::Closed), Err(Error::BracketViolated(_))));
    }

    #[test]
    fn irrational_driving_term_falls_back_to_float() {
        let p = MasterParams::parse("2", "2", "1/2", "1", "pow(n, 1/2)", "1", "1").unwrap();
        let r = eval_master(Variant::Reals, &p, &q("9"), Method::Recursive).unwrap();
        let c = eval_master(Variant::Reals, &p, &q("9"), Method::Closed).unwrap();
        let want = oracle(2.0, 2.0, 1.0, &|x| x.sqrt(), 9.0);
        assert!((r.to_f64() - want).abs() < 1e-9 && (c.to_f64() - want).abs() < 1e-9);
    }

    #[test]
    fn ceiling_pitfall() {
        let b = q("5/2");
        assert_eq!(ceil_iterate(&b, &q("6"), 2), q("2"));
        assert_eq!(ceil_div(&q("6"), &(&b * &b)), q("1"));
    }

    #[test]
    fn ceiling_queries() {
        let b = q("3/2");
        assert_eq!(ceiling_division(&b, &CeilQuery::FixedPoints).unwrap(), CeilAnswer::FixedPoints(vec![1, 2]));
        assert_eq!(ceil_div(&q("2"), &b), q("2"));
        assert!(matches!(ceiling_division(&b, &CeilQuery::Count { n: 7 }), Err(Error::NonTerminating(_))));
        assert_eq!(ceiling_division(&q("2"), &CeilQuery::Count { n: 8 }).unwrap(), CeilAnswer::Count(3));
        assert_eq!(ceiling_division(&q("2"), &CeilQuery::Iterate { n: 8, i: 2 }).unwrap(), CeilAnswer::Value(2));
        for b in ["2", "5/2", "7"] {
            assert_eq!(fixed_points(&q(b)), vec![1]);
        }
    }

    #[test]
    fn bounds_hold() {
        assert!(verify_master_bounds(&q("2"), 1000).unwrap().clean());
        assert!(verify_master_bounds(&q("5/2"), 6).unwrap().clean());
        let one = verify_master_bounds(&q("3"), 1).unwrap();
        assert!(one.clean());
        assert_eq!(ceil_count(&q("3"), &q("1")).unwrap(), 0);
    }

    #[test]
    fn classes() {
        let cases = [(4, "pow(n,2)", ThetaClass::LeavesDominate), (2, "n*log(2,n)", ThetaClass::Balanced), (1, "n", ThetaClass::DrivingDominates)];
        for (a, label, class) in cases {
            let p = linear(a, "2");
            let r = master_theta_class(Variant::Powers, &p, 14).unwrap();
            assert_eq!((r.class, r.label.as_str()), (class, label));
            assert!(r.c1 > 0.0 && r.c1 <= r.c2);
            assert!(r.stability.stable, "{a}: {:?}", r.stability);
            assert!(r.violations.is_empty());
        }
        assert_eq!(theta_label(&linear(3, "2")), "exp(3,log(2,n))");
        let odd = MasterParams::parse("2", "5/2", "1/2", "1", "n", "1", "1").unwrap();
        for p in [linear(3, "2"), linear(2, "2"), linear(4, "2"), linear(1, "2"), odd] {
            let label = theta_label(&p);
            assert!(crate::parse::parse_expr(&label, 1).is_ok(), "{label}");
        }
    }

    #[test]
    fn integers_agree_with_table() {
        let p = linear(3, "2");
        let table = prefix_values(Variant::Integers, &p, 8).unwrap();
        for (x, t) in table.iter().step_by(7) {
            assert_eq!(eval_master(Variant::Integers, &p, x, Method::Closed).unwrap(), *t);
        }
    }
}
