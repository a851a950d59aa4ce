//! Integer-tuple domains: finite point sets and (optionally constrained) grids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Point, Result};
use crate::expr::Predicate;

/// Upper bound on the number of points a single box enumeration may produce.
pub const DEFAULT_POINT_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Naturals,
    PositiveNaturals,
    Integers,
}

impl Base {
    /// Smallest coordinate of the sample box at horizon `h`.
    pub fn lower(self, h: i64) -> i64 {
        match self {
            Base::Naturals => 0,
            Base::PositiveNaturals => 1,
            Base::Integers => -h,
        }
    }

    pub fn contains(self, v: i64) -> bool {
        match self {
            Base::Naturals => v >= 0,
            Base::PositiveNaturals => v >= 1,
            Base::Integers => true,
        }
    }

    /// `self ⊆ other` as sets of integers.
    pub fn subset_of(self, other: Base) -> bool {
        matches!(
            (self, other),
            (_, Base::Integers) | (Base::Naturals, Base::Naturals) | (Base::PositiveNaturals, _)
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Base::Naturals => "N",
            Base::PositiveNaturals => "N+",
            Base::Integers => "Z",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainSpec {
    /// Distinct points of a common arity, kept in lexicographic order.
    Finite { dim: usize, points: Vec<Point> },
    Grid { dim: usize, base: Base, constraint: Option<Predicate> },
}

impl DomainSpec {
    pub fn finite(points: Vec<Point>) -> Result<DomainSpec> {
        let dim = points.first().map_or(1, |p| p.len());
        DomainSpec::finite_with_dim(dim, points)
    }

    pub fn finite_with_dim(dim: usize, mut points: Vec<Point>) -> Result<DomainSpec> {
        if dim == 0 {
            return Err(Error::Invalid("domain dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Invalid(format!("point {p:?} does not have arity {dim}")));
        }
        points.sort();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("finite domain points must be distinct".into()));
        }
        Ok(DomainSpec::Finite { dim, points })
    }

    /// The integers `lo..=hi` as a one-dimensional finite domain.
    pub fn range(lo: i64, hi: i64) -> DomainSpec {
        DomainSpec::Finite { dim: 1, points: (lo..=hi).map(|v| vec![v]).collect() }
    }

    pub fn grid(dim: usize, base: Base) -> DomainSpec {
        assert!(dim >= 1, "grid dimension must be positive");
        DomainSpec::Grid { dim, base, constraint: None }
    }

    pub fn naturals() -> DomainSpec {
        DomainSpec::grid(1, Base::Naturals)
    }

    pub fn with_constraint(self, pred: Predicate) -> Result<DomainSpec> {
        match self {
            DomainSpec::Grid { dim, base, constraint } => {
                if pred.arity() > dim {
                    return Err(Error::Invalid(format!("constraint uses more than {dim} coordinates")));
                }
                let constraint = Some(match constraint {
                    Some(c) => Predicate::and(c, pred),
                    None => pred,
                });
                Ok(DomainSpec::Grid { dim, base, constraint })
            }
            DomainSpec::Finite { dim, points } => {
                let mut kept = Vec::new();
                for p in points {
                    if pred.holds_at(&p)? {
                        kept.push(p);
                    }
                }
                Ok(DomainSpec::Finite { dim, points: kept })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Finite { dim, .. } | DomainSpec::Grid { dim, .. } => *dim,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DomainSpec::Finite { .. })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, DomainSpec::Finite { points, .. } if points.is_empty())
    }

    pub fn finite_points(&self) -> Option<&[Point]> {
        match self {
            DomainSpec::Finite { points, .. } => Some(points),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<Base> {
        match self {
            DomainSpec::Grid { base, .. } => Some(*base),
            _ => None,
        }
    }

    /// Position of `p` among the sorted points of a finite domain.
    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        match self {
            DomainSpec::Finite { points, .. } => points.binary_search_by(|q| q.as_slice().cmp(p)).ok(),
            _ => None,
        }
    }

    pub fn contains(&self, p: &[i64]) -> Result<bool> {
        match self {
            DomainSpec::Finite { .. } => Ok(self.index_of(p).is_some()),
            DomainSpec::Grid { dim, base, constraint } => {
                if p.len() != *dim || !p.iter().all(|&v| base.contains(v)) {
                    return Ok(false);
                }
                match constraint {
                    Some(c) => Ok(c.holds_at(p)?),
                    None => Ok(true),
                }
            }
        }
    }

    /// Domain points inside the sample box at horizon `h`, lexicographically.
    /// Finite domains return all their points.
    pub fn points_in_box(&self, h: u64) -> Result<Vec<Point>> {
        self.points_in_box_budget(h, DEFAULT_POINT_BUDGET)
    }

    pub fn points_in_box_budget(&self, h: u64, budget: usize) -> Result<Vec<Point>> {
        match self {
            DomainSpec::Finite { points, .. } => Ok(points.clone()),
            DomainSpec::Grid { dim, base, constraint } => {
                let hi = h as i64;
                let lo = base.lower(hi);
                if hi < lo {
                    return Ok(Vec::new());
                }
                let side = (hi - lo + 1) as u128;
                let total = side.checked_pow(*dim as u32).unwrap_or(u128::MAX);
                if total > budget as u128 {
                    return Err(Error::HorizonOverflow { horizon: h, budget });
                }
                let mut out = Vec::with_capacity(total as usize);
                let mut cur = vec![lo; *dim];
                loop {
                    let keep = match constraint {
                        Some(c) => c.holds_at(&cur)?,
                        None => true,
                    };
                    if keep {
                        out.push(cur.clone());
                    }
                    // odometer step, last coordinate fastest
                    let mut k = *dim;
                    loop {
                        if k == 0 {
                            return Ok(out);
                        }
                        k -= 1;
                        if cur[k] < hi {
                            cur[k] += 1;
                            break;
                        }
                        cur[k] = lo;
                    }
                }
            }
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Finite { points, dim } => {
                let body: Vec<String> = points
                    .iter()
                    .map(|p| if *dim == 1 { p[0].to_string() } else { crate::error::fmt_point(p) })
                    .collect();
                write!(f, "finite:[{}]", body.join(","))
            }
            DomainSpec::Grid { dim, base, constraint } => {
                write!(f, "{}^{}", base.symbol(), dim)?;
                if let Some(c) = constraint {
                    write!(f, " where {c}")?;
                }
                Ok(())
            }
        }
    }
}
