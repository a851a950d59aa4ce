//! Exact rationals with an `i128` fast path, plus the float companion used
//! by tolerance-based evaluation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Relative tolerance used by float-mode comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// An exact rational number.
///
/// Values that fit in `i128` numerator/denominator stay in the small
/// representation; larger ones spill into `BigRational`. The representation
/// is canonical, so structural equality is numeric equality.
#[derive(Clone)]
pub enum Q {
    Small(Ratio<i128>),
    Big(BigRational),
}

fn big_to_q(b: BigRational) -> Q {
    match (b.numer().to_i128(), b.denom().to_i128()) {
        (Some(n), Some(d)) => Q::Small(Ratio::new_raw(n, d)),
        _ => Q::Big(b),
    }
}

fn small_to_big(r: &Ratio<i128>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Q> for &Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
                    if let Some(r) = a.$checked(b) {
                        return Q::Small(r);
                    }
                }
                big_to_q(self.to_big().$method(rhs.to_big()))
            }
        }
        impl $trait<Q> for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Q> for Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Div<&Q> for &Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(r) = a.checked_div(b) {
                return Q::Small(r);
            }
        }
        big_to_q(self.to_big() / rhs.to_big())
    }
}

impl Div<Q> for Q {
    type Output = Q;
    fn div(self, rhs: Q) -> Q {
        (&self).div(&rhs)
    }
}

impl Div<&Q> for Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        (&self).div(rhs)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(a) if *a.numer() != i128::MIN => Q::Small(-a),
            _ => big_to_q(-self.to_big()),
        }
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        -&self
    }
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Ratio::from_integer(0))
    }

    pub fn one() -> Q {
        Q::Small(Ratio::from_integer(1))
    }

    pub fn int(i: i64) -> Q {
        Q::Small(Ratio::from_integer(i as i128))
    }

    pub fn from_i128(i: i128) -> Q {
        Q::Small(Ratio::from_integer(i))
    }

    /// `n/d`; panics on a zero denominator.
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::Small(Ratio::new(n as i128, d as i128))
    }

    pub fn from_bigint(i: BigInt) -> Q {
        big_to_q(BigRational::from_integer(i))
    }

    pub fn from_big(b: BigRational) -> Q {
        big_to_q(b)
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Option<Q> {
        BigRational::from_float(x).map(big_to_q)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(r) => small_to_big(r),
            Q::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(r) => BigInt::from(*r.numer()),
            Q::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(r) => BigInt::from(*r.denom()),
            Q::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(r) => r.is_negative(),
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && !self.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Q {
        match self {
            Q::Small(r) => Q::Small(r.floor()),
            Q::Big(b) => big_to_q(b.floor()),
        }
    }

    pub fn ceil(&self) -> Q {
        match self {
            Q::Small(r) => Q::Small(r.ceil()),
            Q::Big(b) => big_to_q(b.ceil()),
        }
    }

    pub fn recip(&self) -> Q {
        &Q::one() / self
    }

    /// Integer power; negative exponents require a non-zero base.
    pub fn powi(&self, e: i64) -> Q {
        if e < 0 {
            return self.recip().powi(-e);
        }
        let mut base = self.clone();
        let mut acc = Q::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                if n.unsigned_abs() < (1u128 << 53) && d < (1i128 << 53) {
                    n as f64 / d as f64
                } else {
                    small_to_big(r).to_f64().unwrap_or(f64::NAN)
                }
            }
            Q::Big(b) => b.to_f64().unwrap_or_else(|| {
                if b.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }

    /// The value as `i64` when it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_integer() {
            return None;
        }
        match self {
            Q::Small(r) => i64::try_from(*r.numer()).ok(),
            Q::Big(b) => b.numer().to_i64(),
        }
    }

    pub fn max(self, other: Q) -> Q {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Q) -> Q {
        if other < self {
            other
        } else {
            self
        }
    }

    /// The exact value of `self^r`, when it is rational.
    ///
    /// Returns `None` for irrational results, odd roots aside from the sign
    /// rules, and for `0` raised to a negative power.
    pub fn pow_rational(&self, r: &Q) -> Option<Q> {
        let p = r.numer().to_i64()?;
        let q = r.denom().to_u32()?;
        if self.is_zero() {
            return if p > 0 { Some(Q::zero()) } else if p == 0 { Some(Q::one()) } else { None };
        }
        if q == 1 {
            return Some(self.powi(p));
        }
        if self.is_negative() {
            return None;
        }
        let n = int_root_exact(&self.numer(), q)?;
        let d = int_root_exact(&self.denom(), q)?;
        Some(Q::from_big(BigRational::new(n, d)).powi(p))
    }

    /// `floor(self^r)` computed exactly for `self >= 0`.
    pub fn floor_pow(&self, r: &Q) -> Option<Q> {
        if self.is_negative() {
            return None;
        }
        if let Some(v) = self.pow_rational(r) {
            return Some(v.floor());
        }
        let p = r.numer().to_i64()?;
        let q = r.denom().to_u32()?;
        if self.is_zero() {
            return None;
        }
        // floor(x^(p/q)) = largest k with k^q <= x^p
        let y = self.powi(p);
        Some(Q::from_bigint(floor_root(&y, q)))
    }

    /// `ceil(self^r)` computed exactly for `self >= 0`.
    pub fn ceil_pow(&self, r: &Q) -> Option<Q> {
        if let Some(v) = self.pow_rational(r) {
            return Some(v.ceil());
        }
        self.floor_pow(r).map(|f| &f + &Q::one())
    }
}

/// Exact integer `q`-th root of a non-negative integer when it exists.
fn int_root_exact(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Largest integer `k >= 0` with `k^q <= y`, for rational `y >= 0`.
fn floor_root(y: &Q, q: u32) -> BigInt {
    // k^q <= n/d  <=>  k^q * d <= n; start from the root of floor(y)
    let n = y.numer();
    let d = y.denom();
    let mut k = (&n / &d).nth_root(q);
    loop {
        let next = &k + BigInt::one();
        if num_traits::pow(next.clone(), q as usize) * &d <= n {
            k = next;
        } else {
            break;
        }
    }
    while k > BigInt::zero() && num_traits::pow(k.clone(), q as usize) * &d > n {
        k -= BigInt::one();
    }
    k
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a == b,
            (Q::Big(a), Q::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Q::Small(r) => {
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Q::Big(b) => {
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Q::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseQError(pub String);

impl FromStr for Q {
    type Err = ParseQError;

    /// Accepts `p`, `-p`, `p/q` and decimal forms such as `0.25`.
    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let t = s.trim();
        let err = || ParseQError(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Q::from_big(BigRational::new(n, d)));
        }
        if let Some((ip, fp)) = t.split_once('.') {
            if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            let neg = ip.starts_with('-');
            let ip_abs = ip.trim_start_matches('-');
            let whole: BigInt = if ip_abs.is_empty() {
                BigInt::zero()
            } else {
                ip_abs.parse().map_err(|_| err())?
            };
            let frac: BigInt = fp.parse().map_err(|_| err())?;
            let scale = num_traits::pow(BigInt::from(10), fp.len());
            let mag = BigRational::new(whole * &scale + frac, scale);
            return Ok(Q::from_big(if neg { -mag } else { mag }));
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(Q::from_bigint(n))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            I(i64),
        }
        match Repr::deserialize(d)? {
            Repr::S(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::I(i) => Ok(Q::int(i)),
        }
    }
}

impl From<i64> for Q {
    fn from(i: i64) -> Q {
        Q::int(i)
    }
}

/// Relative-tolerance `a <= b` for floats.
pub fn approx_le(a: f64, b: f64, rel_tol: f64) -> bool {
    a <= b || (a - b) <= rel_tol * a.abs().max(b.abs())
}

/// Relative-tolerance equality for floats.
pub fn approx_eq(a: f64, b: f64, rel_tol: f64) -> bool {
    a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}

/// `floor(log_b(x))` for rational `x >= 1` and `b > 1`, by exact division.
pub fn floor_log(b: &Q, x: &Q) -> u32 {
    assert!(*b > Q::one() && *x >= Q::one());
    let mut k = 0;
    let mut y = x.clone();
    while y >= *b {
        y = &y / b;
        k += 1;
    }
    k
}
