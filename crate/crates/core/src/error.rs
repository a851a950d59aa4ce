use crate::expr::EvalError;

/// Integer tuple; the coordinates of a domain point.
pub type Point = Vec<i64>;

pub fn fmt_point(p: &[i64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("negative value at {}", fmt_point(.0))]
    NegativeValue(Point),
    #[error("function undefined at {}: {}", fmt_point(.0), .1)]
    PartialFunction(Point, String),
    #[error("exact mode cannot represent the body: {0}")]
    InexactBody(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("map leaves the target domain at {}", fmt_point(.0))]
    RangeEscape(Point),
    #[error("operation needs a finite domain")]
    NotFinite,
    #[error("box of horizon {horizon} exceeds the point budget {budget}")]
    HorizonOverflow { horizon: u64, budget: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("unknown case {0}")]
    UnknownCase(String),
    #[error("point {0} is not in the recurrence domain")]
    PointNotInDomain(String),
    #[error("driving function leaves its bracket at n = {0}")]
    BracketViolated(String),
    #[error("ceiling division does not terminate from {0}")]
    NonTerminating(String),
    #[error("bracket search failed: {0}")]
    BracketSearchFailed(String),
    #[error("transform domain mismatch: {0}")]
    TransformDomainMismatch(String),
    #[error("declared inverse is not a right inverse: {0}")]
    RightInverseViolated(String),
    #[error("fiber of {} has zero total weight", fmt_point(.0))]
    ZeroMassFiber(Point),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T> = std::result::Result<T, Error>;
