//! Function-expression AST, its evaluator, and the canonical text printer.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::num::Q;

/// Comparison operators usable in indicators, guards and domain constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// A boolean condition over expression values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predicate {
    Cmp(FuncExpr, CmpOp, FuncExpr),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

/// Expression tree for a function of the coordinates `x1..xd`.
///
/// `Slot(k)` stands for the value of the `k`-th operand when an expression
/// is used as a combinator template, and `Index` is the summation index
/// inside the `map`/`weight` parts of a `SubsetSum` node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FuncExpr {
    Const(Q),
    Coord(usize),
    Slot(usize),
    Index,
    Add(Box<FuncExpr>, Box<FuncExpr>),
    Mul(Box<FuncExpr>, Box<FuncExpr>),
    Max(Box<FuncExpr>, Box<FuncExpr>),
    Min(Box<FuncExpr>, Box<FuncExpr>),
    Scale(Q, Box<FuncExpr>),
    Pow(Box<FuncExpr>, Q),
    Log(Q, Box<FuncExpr>),
    Exp(Q, Box<FuncExpr>),
    Floor(Box<FuncExpr>),
    Ceil(Box<FuncExpr>),
    Sgn(Box<FuncExpr>),
    Ind(Box<Predicate>),
    If(Box<Predicate>, Box<FuncExpr>, Box<FuncExpr>),
    /// `y ↦ Σ_{i < count(y)} weight(y, i) · body(map(y, i))`.
    SubsetSum {
        count: Box<FuncExpr>,
        weight: Box<FuncExpr>,
        map: Vec<FuncExpr>,
        body: Box<FuncExpr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("undefined: {0}")]
    Partial(String),
    #[error("value is not rational: {0}")]
    Irrational(String),
    #[error("unbound operand slot ${0}")]
    UnboundSlot(usize),
    #[error("coordinate x{0} out of range")]
    BadCoord(usize),
    #[error("expected an integer, got {0}")]
    NotInteger(String),
    #[error("exponent {0} too large")]
    Overflow(String),
}

/// Largest integer exponent `ExpBase` evaluates.
const MAX_EXP: i64 = 1 << 16;

/// Arithmetic needed by the evaluator; implemented exactly for [`Q`] and
/// approximately for `f64`.
pub trait Scalar: Clone + PartialOrd + fmt::Display {
    fn from_q(q: &Q) -> Self;
    fn from_i64(i: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn pow(&self, r: &Q) -> Result<Self, EvalError>;
    fn floor_pow(&self, r: &Q) -> Result<Self, EvalError>;
    fn ceil_pow(&self, r: &Q) -> Result<Self, EvalError>;
    fn log(base: &Q, x: &Self) -> Result<Self, EvalError>;
    fn exp(base: &Q, e: &Self) -> Result<Self, EvalError>;
    fn to_i64(&self) -> Option<i64>;
    fn to_f64(&self) -> f64;
}

impl Scalar for Q {
    fn from_q(q: &Q) -> Q {
        q.clone()
    }
    fn from_i64(i: i64) -> Q {
        Q::int(i)
    }
    fn add(&self, o: &Q) -> Q {
        self + o
    }
    fn mul(&self, o: &Q) -> Q {
        self * o
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Q::is_negative(self)
    }
    fn floor(&self) -> Q {
        Q::floor(self)
    }
    fn ceil(&self) -> Q {
        Q::ceil(self)
    }
    fn pow(&self, r: &Q) -> Result<Q, EvalError> {
        if self.is_zero() && r.is_negative() {
            return Err(EvalError::Partial(format!("pow(0, {r})")));
        }
        self.pow_rational(r)
            .ok_or_else(|| EvalError::Irrational(format!("pow({self}, {r})")))
    }
    fn floor_pow(&self, r: &Q) -> Result<Q, EvalError> {
        if self.is_zero() && r.is_negative() {
            return Err(EvalError::Partial(format!("pow(0, {r})")));
        }
        Q::floor_pow(self, r).ok_or_else(|| EvalError::Partial(format!("pow({self}, {r})")))
    }
    fn ceil_pow(&self, r: &Q) -> Result<Q, EvalError> {
        if self.is_zero() && r.is_negative() {
            return Err(EvalError::Partial(format!("pow(0, {r})")));
        }
        Q::ceil_pow(self, r).ok_or_else(|| EvalError::Partial(format!("pow({self}, {r})")))
    }
    fn log(base: &Q, x: &Q) -> Result<Q, EvalError> {
        if !x.is_positive() {
            return Err(EvalError::Partial(format!("log({base}, {x})")));
        }
        // rational only when x is an integral power of base
        let mut k = 0i64;
        let mut y = x.clone();
        if y >= Q::one() {
            while y > Q::one() {
                y = &y / base;
                k += 1;
            }
        } else {
            while y < Q::one() {
                y = &y * base;
                k -= 1;
            }
        }
        if y == Q::one() {
            Ok(Q::int(k))
        } else {
            Err(EvalError::Irrational(format!("log({base}, {x})")))
        }
    }
    fn exp(base: &Q, e: &Q) -> Result<Q, EvalError> {
        match e.to_i64() {
            Some(k) if k.abs() <= MAX_EXP => {
                if base.is_zero() && k < 0 {
                    Err(EvalError::Partial(format!("exp(0, {e})")))
                } else {
                    Ok(base.powi(k))
                }
            }
            Some(_) => Err(EvalError::Overflow(e.to_string())),
            None => base
                .pow_rational(e)
                .ok_or_else(|| EvalError::Irrational(format!("exp({base}, {e})"))),
        }
    }
    fn to_i64(&self) -> Option<i64> {
        Q::to_i64(self)
    }
    fn to_f64(&self) -> f64 {
        Q::to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_q(q: &Q) -> f64 {
        q.to_f64()
    }
    fn from_i64(i: i64) -> f64 {
        i as f64
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn mul(&self, o: &f64) -> f64 {
        // keep 0 * inf at 0 so guarded branches stay total
        if *self == 0.0 || *o == 0.0 {
            0.0
        } else {
            self * o
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn floor(&self) -> f64 {
        f64::floor(*self)
    }
    fn ceil(&self) -> f64 {
        f64::ceil(*self)
    }
    fn pow(&self, r: &Q) -> Result<f64, EvalError> {
        if *self == 0.0 && r.is_negative() {
            return Err(EvalError::Partial(format!("pow(0, {r})")));
        }
        if *self < 0.0 && !r.is_integer() {
            return Err(EvalError::Partial(format!("pow({self}, {r})")));
        }
        match r.to_i64() {
            Some(k) if k.abs() <= i32::MAX as i64 => Ok(self.powi(k as i32)),
            _ => Ok(self.powf(r.to_f64())),
        }
    }
    fn floor_pow(&self, r: &Q) -> Result<f64, EvalError> {
        Scalar::pow(self, r).map(f64::floor)
    }
    fn ceil_pow(&self, r: &Q) -> Result<f64, EvalError> {
        Scalar::pow(self, r).map(f64::ceil)
    }
    fn log(base: &Q, x: &f64) -> Result<f64, EvalError> {
        if *x <= 0.0 {
            return Err(EvalError::Partial(format!("log({base}, {x})")));
        }
        Ok(x.ln() / base.to_f64().ln())
    }
    fn exp(base: &Q, e: &f64) -> Result<f64, EvalError> {
        let b = base.to_f64();
        if b == 0.0 && *e < 0.0 {
            return Err(EvalError::Partial(format!("exp(0, {e})")));
        }
        Ok(b.powf(*e))
    }
    fn to_i64(&self) -> Option<i64> {
        if self.fract() == 0.0 && self.abs() < 9.0e15 {
            Some(*self as i64)
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Evaluation environment: coordinate values, template operands and the
/// current summation index.
pub struct Env<'a, N> {
    pub coords: &'a [N],
    pub slots: &'a [N],
    pub index: Option<i64>,
}

impl FuncExpr {
    pub fn constant(q: Q) -> FuncExpr {
        FuncExpr::Const(q)
    }

    pub fn int(i: i64) -> FuncExpr {
        FuncExpr::Const(Q::int(i))
    }

    pub fn coord(i: usize) -> FuncExpr {
        FuncExpr::Coord(i)
    }

    pub fn slot(i: usize) -> FuncExpr {
        FuncExpr::Slot(i)
    }

    pub fn add(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Add(Box::new(a), Box::new(FuncExpr::Scale(Q::int(-1), Box::new(b))))
    }

    pub fn mul(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn max(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Max(Box::new(a), Box::new(b))
    }

    pub fn min(a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::Min(Box::new(a), Box::new(b))
    }

    pub fn scale(q: Q, a: FuncExpr) -> FuncExpr {
        FuncExpr::Scale(q, Box::new(a))
    }

    pub fn pow(a: FuncExpr, r: Q) -> FuncExpr {
        FuncExpr::Pow(Box::new(a), r)
    }

    pub fn floor(a: FuncExpr) -> FuncExpr {
        FuncExpr::Floor(Box::new(a))
    }

    pub fn ceil(a: FuncExpr) -> FuncExpr {
        FuncExpr::Ceil(Box::new(a))
    }

    pub fn sgn(a: FuncExpr) -> FuncExpr {
        FuncExpr::Sgn(Box::new(a))
    }

    pub fn ind(p: Predicate) -> FuncExpr {
        FuncExpr::Ind(Box::new(p))
    }

    pub fn ite(p: Predicate, a: FuncExpr, b: FuncExpr) -> FuncExpr {
        FuncExpr::If(Box::new(p), Box::new(a), Box::new(b))
    }

    /// Sum of a list of expressions; `0` for the empty list.
    pub fn sum(items: Vec<FuncExpr>) -> FuncExpr {
        let mut it = items.into_iter();
        match it.next() {
            None => FuncExpr::int(0),
            Some(first) => it.fold(first, FuncExpr::add),
        }
    }

    /// Evaluate exactly or approximately, depending on `N`.
    pub fn eval<N: Scalar>(&self, env: &Env<'_, N>) -> Result<N, EvalError> {
        use FuncExpr::*;
        Ok(match self {
            Const(q) => N::from_q(q),
            Coord(i) => env
                .coords
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or(EvalError::BadCoord(*i))?,
            Slot(k) => env.slots.get(*k).cloned().ok_or(EvalError::UnboundSlot(*k))?,
            Index => N::from_i64(env.index.ok_or_else(|| EvalError::Partial("index outside a sum".into()))?),
            Add(a, b) => a.eval(env)?.add(&b.eval(env)?),
            Mul(a, b) => {
                let x = a.eval(env)?;
                if x.is_zero() {
                    // a zero factor short-circuits, so guards like ind(..)*pow(..,-1) stay total
                    x
                } else {
                    x.mul(&b.eval(env)?)
                }
            }
            Max(a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                if y > x {
                    y
                } else {
                    x
                }
            }
            Min(a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                if y < x {
                    y
                } else {
                    x
                }
            }
            Scale(q, a) => a.eval(env)?.mul(&N::from_q(q)),
            Pow(a, r) => a.eval(env)?.pow(r)?,
            Log(b, a) => N::log(b, &a.eval(env)?)?,
            Exp(b, a) => N::exp(b, &a.eval(env)?)?,
            Floor(a) => match a.as_ref() {
                Pow(inner, r) => inner.eval(env)?.floor_pow(r)?,
                _ => a.eval(env)?.floor(),
            },
            Ceil(a) => match a.as_ref() {
                Pow(inner, r) => inner.eval(env)?.ceil_pow(r)?,
                _ => a.eval(env)?.ceil(),
            },
            Sgn(a) => {
                let x = a.eval(env)?;
                N::from_i64(if x.is_zero() {
                    0
                } else if x.is_negative() {
                    -1
                } else {
                    1
                })
            }
            Ind(p) => N::from_i64(p.eval(env)? as i64),
            If(p, a, b) => {
                if p.eval(env)? {
                    a.eval(env)?
                } else {
                    b.eval(env)?
                }
            }
            SubsetSum { count, weight, map, body } => {
                let n = count.eval(env)?;
                let n = n.to_i64().filter(|n| *n >= 0).ok_or_else(|| EvalError::NotInteger(n.to_string()))?;
                let mut acc = N::from_i64(0);
                let mut point: Vec<N> = Vec::with_capacity(map.len());
                for i in 0..n {
                    let inner = Env { coords: env.coords, slots: env.slots, index: Some(i) };
                    let w = weight.eval(&inner)?;
                    if w.is_zero() {
                        continue;
                    }
                    point.clear();
                    for m in map {
                        let v = m.eval(&inner)?;
                        let k = v.to_i64().ok_or_else(|| EvalError::NotInteger(v.to_string()))?;
                        point.push(N::from_i64(k));
                    }
                    let at = Env { coords: &point, slots: env.slots, index: None };
                    acc = acc.add(&w.mul(&body.eval(&at)?));
                }
                acc
            }
        })
    }

    /// Largest coordinate index referenced outside `SubsetSum` bodies.
    pub fn arity(&self) -> usize {
        let mut m = 0;
        self.visit_outer(&mut |e| {
            if let FuncExpr::Coord(i) = e {
                m = m.max(*i);
            }
        });
        m
    }

    /// Number of template slots referenced.
    pub fn slot_count(&self) -> usize {
        let mut m = 0;
        self.visit_outer(&mut |e| {
            if let FuncExpr::Slot(k) = e {
                m = m.max(*k + 1);
            }
        });
        m
    }

    /// True if any node satisfies `pred`, searching everywhere including sums.
    pub fn any(&self, pred: &dyn Fn(&FuncExpr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        let mut found = false;
        self.for_each_child(&mut |c| {
            if !found && c.any(pred) {
                found = true;
            }
        });
        found
    }

    fn for_each_child(&self, f: &mut dyn FnMut(&FuncExpr)) {
        use FuncExpr::*;
        match self {
            Const(_) | Coord(_) | Slot(_) | Index => {}
            Add(a, b) | Mul(a, b) | Max(a, b) | Min(a, b) => {
                f(a);
                f(b);
            }
            Scale(_, a) | Pow(a, _) | Log(_, a) | Exp(_, a) | Floor(a) | Ceil(a) | Sgn(a) => f(a),
            Ind(p) => p.for_each_expr(f),
            If(p, a, b) => {
                p.for_each_expr(f);
                f(a);
                f(b);
            }
            SubsetSum { count, weight, map, body } => {
                f(count);
                f(weight);
                for m in map {
                    f(m);
                }
                f(body);
            }
        }
    }

    /// Visit nodes evaluated in the outer coordinate frame (skips sum bodies).
    fn visit_outer(&self, f: &mut dyn FnMut(&FuncExpr)) {
        f(self);
        use FuncExpr::*;
        match self {
            SubsetSum { count, weight, map, .. } => {
                count.visit_outer(f);
                weight.visit_outer(f);
                for m in map {
                    m.visit_outer(f);
                }
            }
            _ => self.for_each_child(&mut |c| c.visit_outer(f)),
        }
    }

    /// Rebuild with every outer-frame node passed through `f` bottom-up.
    fn rewrite(&self, f: &dyn Fn(&FuncExpr) -> Option<FuncExpr>) -> FuncExpr {
        use FuncExpr::*;
        if let Some(r) = f(self) {
            return r;
        }
        let b = |e: &FuncExpr| Box::new(e.rewrite(f));
        match self {
            Const(_) | Coord(_) | Slot(_) | Index => self.clone(),
            Add(x, y) => Add(b(x), b(y)),
            Mul(x, y) => Mul(b(x), b(y)),
            Max(x, y) => Max(b(x), b(y)),
            Min(x, y) => Min(b(x), b(y)),
            Scale(q, x) => Scale(q.clone(), b(x)),
            Pow(x, r) => Pow(b(x), r.clone()),
            Log(q, x) => Log(q.clone(), b(x)),
            Exp(q, x) => Exp(q.clone(), b(x)),
            Floor(x) => Floor(b(x)),
            Ceil(x) => Ceil(b(x)),
            Sgn(x) => Sgn(b(x)),
            Ind(p) => Ind(Box::new(p.rewrite(f))),
            If(p, x, y) => If(Box::new(p.rewrite(f)), b(x), b(y)),
            SubsetSum { count, weight, map, body } => SubsetSum {
                count: b(count),
                weight: b(weight),
                map: map.iter().map(|m| m.rewrite(f)).collect(),
                body: body.clone(),
            },
        }
    }

    /// Replace `Coord(i)` by `with[i-1]`.
    pub fn subst_coords(&self, with: &[FuncExpr]) -> FuncExpr {
        self.rewrite(&|e| match e {
            FuncExpr::Coord(i) => with.get(i - 1).cloned(),
            _ => None,
        })
    }

    /// Replace `Slot(k)` by `with[k]`.
    pub fn subst_slots(&self, with: &[FuncExpr]) -> FuncExpr {
        self.rewrite(&|e| match e {
            FuncExpr::Slot(k) => with.get(*k).cloned(),
            _ => None,
        })
    }

    fn level(&self) -> u8 {
        match self {
            FuncExpr::Add(..) | FuncExpr::Max(..) | FuncExpr::Min(..) => 0,
            FuncExpr::Mul(..) | FuncExpr::Scale(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        use FuncExpr::*;
        match self {
            Const(q) => write!(f, "{q}"),
            Coord(i) => write!(f, "x{i}"),
            Slot(k) => write!(f, "${k}"),
            Index => write!(f, "i"),
            Add(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " + ")?;
                b.fmt_at(f, 1)
            }
            Max(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " max ")?;
                b.fmt_at(f, 1)
            }
            Min(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " min ")?;
                b.fmt_at(f, 1)
            }
            Mul(a, b) => {
                // a literal or scaled left factor would re-parse as Scale
                match a.as_ref() {
                    Const(_) | Scale(..) => {
                        write!(f, "(")?;
                        a.fmt_at(f, 0)?;
                        write!(f, ")")?;
                    }
                    _ => a.fmt_at(f, 1)?,
                }
                write!(f, "*")?;
                b.fmt_at(f, 2)
            }
            Scale(q, a) => {
                write!(f, "{q}*")?;
                a.fmt_at(f, 1)
            }
            Pow(a, r) => {
                write!(f, "pow(")?;
                a.fmt_at(f, 0)?;
                write!(f, ", {r})")
            }
            Log(b, a) => {
                write!(f, "log({b}, ")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Exp(b, a) => {
                write!(f, "exp({b}, ")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Floor(a) => {
                write!(f, "floor(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Ceil(a) => {
                write!(f, "ceil(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Sgn(a) => {
                write!(f, "sgn(")?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Ind(p) => write!(f, "ind({p})"),
            If(p, a, b) => {
                write!(f, "if({p}, ")?;
                a.fmt_at(f, 0)?;
                write!(f, ", ")?;
                b.fmt_at(f, 0)?;
                write!(f, ")")
            }
            SubsetSum { count, weight, map, body } => {
                write!(f, "subsetsum({count}; {weight}; [")?;
                for (k, m) in map.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "]; {body})")
            }
        }
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Predicate {
    pub fn cmp(a: FuncExpr, op: CmpOp, b: FuncExpr) -> Predicate {
        Predicate::Cmp(a, op, b)
    }

    pub fn and(a: Predicate, b: Predicate) -> Predicate {
        Predicate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Predicate, b: Predicate) -> Predicate {
        Predicate::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Predicate) -> Predicate {
        Predicate::Not(Box::new(a))
    }

    pub fn eval<N: Scalar>(&self, env: &Env<'_, N>) -> Result<bool, EvalError> {
        Ok(match self {
            Predicate::Cmp(a, op, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                op.holds(&x, &y)
            }
            Predicate::And(a, b) => a.eval(env)? && b.eval(env)?,
            Predicate::Or(a, b) => a.eval(env)? || b.eval(env)?,
            Predicate::Not(a) => !a.eval(env)?,
        })
    }

    /// Exact evaluation at an integer point.
    pub fn holds_at(&self, point: &[i64]) -> Result<bool, EvalError> {
        let coords: Vec<Q> = point.iter().map(|&v| Q::int(v)).collect();
        self.eval(&Env { coords: &coords, slots: &[], index: None })
    }

    pub fn arity(&self) -> usize {
        let mut m = 0;
        self.for_each_expr(&mut |e| m = m.max(e.arity()));
        m
    }

    fn for_each_expr(&self, f: &mut dyn FnMut(&FuncExpr)) {
        match self {
            Predicate::Cmp(a, _, b) => {
                f(a);
                f(b);
            }
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            Predicate::Not(a) => a.for_each_expr(f),
        }
    }

    fn rewrite(&self, f: &dyn Fn(&FuncExpr) -> Option<FuncExpr>) -> Predicate {
        match self {
            Predicate::Cmp(a, op, b) => Predicate::Cmp(a.rewrite(f), *op, b.rewrite(f)),
            Predicate::And(a, b) => Predicate::And(Box::new(a.rewrite(f)), Box::new(b.rewrite(f))),
            Predicate::Or(a, b) => Predicate::Or(Box::new(a.rewrite(f)), Box::new(b.rewrite(f))),
            Predicate::Not(a) => Predicate::Not(Box::new(a.rewrite(f))),
        }
    }

    pub fn subst_coords(&self, with: &[FuncExpr]) -> Predicate {
        self.rewrite(&|e| match e {
            FuncExpr::Coord(i) => with.get(i - 1).cloned(),
            _ => None,
        })
    }

    pub fn subst_slots(&self, with: &[FuncExpr]) -> Predicate {
        self.rewrite(&|e| match e {
            FuncExpr::Slot(k) => with.get(*k).cloned(),
            _ => None,
        })
    }

    fn level(&self) -> u8 {
        match self {
            Predicate::Or(..) => 0,
            Predicate::And(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Predicate::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Predicate::Or(a, b) => {
                a.fmt_at(f, 0)?;
                write!(f, " or ")?;
                b.fmt_at(f, 1)
            }
            Predicate::And(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " and ")?;
                b.fmt_at(f, 2)
            }
            Predicate::Not(a) => {
                write!(f, "not ")?;
                a.fmt_at(f, 2)
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &FuncExpr, p: &[i64]) -> Result<Q, EvalError> {
        let c: Vec<Q> = p.iter().map(|v| Q::int(*v)).collect();
        e.eval(&Env { coords: &c, slots: &[], index: None })
    }

    #[test]
    fn guarded_reciprocal_is_total() {
        // if(x1 > 0, pow(x1, -1), 0)
        let e = FuncExpr::ite(
            Predicate::cmp(FuncExpr::coord(1), CmpOp::Gt, FuncExpr::int(0)),
            FuncExpr::pow(FuncExpr::coord(1), Q::int(-1)),
            FuncExpr::int(0),
        );
        assert_eq!(at(&e, &[0]).unwrap(), Q::zero());
        assert_eq!(at(&e, &[4]).unwrap(), Q::new(1, 4));
    }

    #[test]
    fn floor_of_root_is_exact() {
        let e = FuncExpr::floor(FuncExpr::pow(FuncExpr::coord(1), Q::new(1, 2)));
        assert_eq!(at(&e, &[15]).unwrap(), Q::int(3));
        assert_eq!(at(&e, &[16]).unwrap(), Q::int(4));
        let bare = FuncExpr::pow(FuncExpr::coord(1), Q::new(1, 2));
        assert!(matches!(at(&bare, &[2]), Err(EvalError::Irrational(_))));
        assert_eq!(at(&bare, &[49]).unwrap(), Q::int(7));
    }

    #[test]
    fn subset_sum_node() {
        // y ↦ Σ_{i < y+1} body(i) with body = x1
        let e = FuncExpr::SubsetSum {
            count: Box::new(FuncExpr::add(FuncExpr::coord(1), FuncExpr::int(1))),
            weight: Box::new(FuncExpr::int(1)),
            map: vec![FuncExpr::Index],
            body: Box::new(FuncExpr::coord(1)),
        };
        assert_eq!(at(&e, &[4]).unwrap(), Q::int(10));
        assert_eq!(e.arity(), 1);
    }
}
