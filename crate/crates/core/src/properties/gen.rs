//! Seeded random instances: base functions, dominated functions, weights,
//! multipliers, maps, covers and sub-domains.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Base, DomainSpec};
use crate::dominance::DominanceKind;
use crate::error::{Point, Result};
use crate::expr::{CmpOp, FuncExpr, Predicate};
use crate::func::{combine, expr_function, make_function, BodySpec, CoordMap, Mode, ResourceFunction, Value};
use crate::num::Q;

/// Largest numerator/denominator of generated rationals.
pub const MAX_PQ: i64 = 64;
/// Features (bumps, indicator thresholds) stay within `[lower, FEATURE_MAX]`.
pub const FEATURE_MAX: i64 = 16;

/// Derive an independent stream for one trial.
pub fn trial_rng(seed: u64, property: usize, kind: usize, trial: usize) -> ChaCha8Rng {
    let mut z = seed
        ^ (property as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (kind as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (trial as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
    // splitmix64 finaliser
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn x() -> FuncExpr {
    FuncExpr::coord(1)
}

fn k(i: i64) -> FuncExpr {
    FuncExpr::int(i)
}

fn q(v: Q) -> FuncExpr {
    FuncExpr::Const(v)
}

fn cmp(a: FuncExpr, op: CmpOp, b: FuncExpr) -> Predicate {
    Predicate::cmp(a, op, b)
}

/// `|x1|` on integers, `x1` elsewhere.
pub fn abs_x(base: Base) -> FuncExpr {
    match base {
        Base::Integers => FuncExpr::max(x(), FuncExpr::scale(Q::int(-1), x())),
        _ => x(),
    }
}

/// `x1 mod 2`, valid on all integers.
pub fn parity() -> FuncExpr {
    FuncExpr::sub(x(), FuncExpr::scale(Q::int(2), FuncExpr::floor(FuncExpr::scale(Q::new(1, 2), x()))))
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub domain: DomainSpec,
}

impl Gen {
    pub fn new(rng: ChaCha8Rng, domain: DomainSpec) -> Gen {
        Gen { rng, domain }
    }

    pub fn base(&self) -> Option<Base> {
        self.domain.base()
    }

    pub fn lower(&self) -> i64 {
        self.base().map_or(0, |b| b.lower(FEATURE_MAX))
    }

    /// Positive rational `p/q` with `p, q ≤ 64`, biased toward small values.
    pub fn pos_rational(&mut self) -> Q {
        let p = if self.rng.gen_bool(0.6) { self.rng.gen_range(1..=8) } else { self.rng.gen_range(1..=MAX_PQ) };
        let d = if self.rng.gen_bool(0.6) { self.rng.gen_range(1..=4) } else { self.rng.gen_range(1..=MAX_PQ) };
        Q::new(p, d)
    }

    /// Rational in `(0, 1]`.
    pub fn unit_rational(&mut self) -> Q {
        let d = self.rng.gen_range(1..=MAX_PQ);
        Q::new(self.rng.gen_range(1..=d), d)
    }

    fn feature_point(&mut self) -> i64 {
        let lo = self.lower().max(-FEATURE_MAX);
        self.rng.gen_range(lo..=FEATURE_MAX)
    }

    fn finite_points(&self) -> Vec<Point> {
        self.domain.finite_points().map(|p| p.to_vec()).unwrap_or_default()
    }

    fn table(&self, vals: impl Fn(&[i64], usize) -> Q) -> ResourceFunction {
        let rows = self.finite_points().into_iter().enumerate().map(|(i, p)| {
            let v = vals(&p, i);
            (p, Value::Exact(v))
        });
        make_function(self.domain.clone(), BodySpec::Table(rows.collect()), Mode::Exact).expect("tables are valid")
    }

    fn expr(&self, e: FuncExpr) -> ResourceFunction {
        expr_function(self.domain.clone(), e, Mode::Exact).expect("generated bodies are valid")
    }

    /// Random table values, roughly one in five zero.
    fn random_table(&mut self, zero_prob: f64) -> ResourceFunction {
        let n = self.finite_points().len();
        let vals: Vec<Q> = (0..n)
            .map(|_| if self.rng.gen_bool(zero_prob) { Q::zero() } else { self.pos_rational() })
            .collect();
        self.table(|_, i| vals[i].clone())
    }

    /// A base resource function with moderate growth.
    pub fn base_function(&mut self) -> ResourceFunction {
        if self.domain.is_finite() {
            return self.random_table(0.2);
        }
        let e = self.base_expr();
        self.expr(e)
    }

    fn base_expr(&mut self) -> FuncExpr {
        let base = self.base().unwrap_or(Base::Naturals);
        let a = self.pos_rational();
        let b = self.pos_rational();
        let ax = abs_x(base);
        match self.rng.gen_range(0..8) {
            0 => q(a),
            1 => FuncExpr::add(FuncExpr::scale(a, ax), q(b)),
            2 => FuncExpr::scale(a, ax),
            3 => FuncExpr::add(FuncExpr::scale(a, FuncExpr::pow(ax, Q::int(2))), q(b)),
            4 => FuncExpr::add(FuncExpr::scale(a, FuncExpr::floor(FuncExpr::pow(ax, Q::new(1, 2)))), q(b)),
            5 => FuncExpr::add(FuncExpr::scale(a, FuncExpr::mul(ax.clone(), ax)), FuncExpr::scale(b, abs_x(base))),
            6 => {
                let t = self.feature_point();
                FuncExpr::add(FuncExpr::scale(a, FuncExpr::ind(cmp(x(), CmpOp::Ge, k(t)))), FuncExpr::scale(b, ax))
            }
            _ => FuncExpr::add(FuncExpr::scale(a, parity()), FuncExpr::add(FuncExpr::scale(b, ax), k(1))),
        }
    }

    /// A strictly positive function (used where a lower bound is needed).
    pub fn positive_function(&mut self) -> ResourceFunction {
        let f = self.base_function();
        let beta = self.pos_rational();
        combine(&FuncExpr::add(FuncExpr::slot(0), q(beta)), &[&f]).unwrap()
    }

    /// Weight with values in `[0, 1]`, piecewise constant or periodic.
    pub fn weight(&mut self) -> ResourceFunction {
        if self.domain.is_finite() {
            let n = self.finite_points().len();
            let vals: Vec<Q> = (0..n)
                .map(|_| if self.rng.gen_bool(0.2) { Q::zero() } else { self.unit_rational() })
                .collect();
            return self.table(|_, i| vals[i].clone());
        }
        let e = self.weight_expr();
        self.expr(e)
    }

    fn weight_expr(&mut self) -> FuncExpr {
        match self.rng.gen_range(0..7) {
            0 => k(1),
            1 => q(Q::new(1, 2)),
            2 => parity(),
            3 => FuncExpr::sub(k(1), parity()),
            4 => {
                let t = self.feature_point();
                FuncExpr::ind(cmp(x(), CmpOp::Ge, k(t)))
            }
            5 => {
                let t = self.feature_point();
                let u = self.unit_rational();
                let bumped = FuncExpr::add(FuncExpr::scale(u, FuncExpr::ind(cmp(x(), CmpOp::Lt, k(t)))), q(Q::new(1, 2)));
                FuncExpr::min(bumped, k(1))
            }
            _ => {
                let u = self.unit_rational();
                q(u)
            }
        }
    }

    /// A function dominated by `f` under `kind`, by construction.
    pub fn dominated(&mut self, kind: DominanceKind, f: &ResourceFunction) -> ResourceFunction {
        let alpha = self.pos_rational();
        let w = self.weight();
        let core = combine(&FuncExpr::scale(alpha, FuncExpr::mul(FuncExpr::slot(0), FuncExpr::slot(1))), &[&w, f]).unwrap();
        match kind {
            DominanceKind::Linear => core,
            DominanceKind::Affine => {
                let beta = self.pos_rational();
                let w2 = self.weight();
                combine(&FuncExpr::add(FuncExpr::slot(0), FuncExpr::scale(beta, FuncExpr::slot(1))), &[&core, &w2])
                    .unwrap()
            }
            DominanceKind::Cofinite => {
                let bumps = self.bumps(3);
                combine(&FuncExpr::add(FuncExpr::slot(0), FuncExpr::slot(1)), &[&core, &bumps]).unwrap()
            }
            DominanceKind::Asymptotic | DominanceKind::CoAsymptotic => {
                let early = self.early_bump();
                combine(&FuncExpr::add(FuncExpr::slot(0), FuncExpr::slot(1)), &[&core, &early]).unwrap()
            }
            DominanceKind::Trivial => self.base_function(),
        }
    }

    /// Non-negative function supported on at most `n` points.
    pub fn bumps(&mut self, n: usize) -> ResourceFunction {
        let count = self.rng.gen_range(0..=n);
        if self.domain.is_finite() {
            let pts = self.finite_points();
            let chosen: Vec<Point> = pts.choose_multiple(&mut self.rng, count.min(pts.len())).cloned().collect();
            let heights: Vec<Q> = chosen.iter().map(|_| self.pos_rational()).collect();
            return self.table(|p, _| {
                chosen.iter().position(|c| c.as_slice() == p).map_or(Q::zero(), |i| heights[i].clone())
            });
        }
        let mut terms = Vec::new();
        for _ in 0..count {
            let p = self.feature_point();
            let r = self.pos_rational();
            terms.push(FuncExpr::scale(r, FuncExpr::ind(cmp(x(), CmpOp::Eq, k(p)))));
        }
        self.expr(FuncExpr::sum(terms))
    }

    /// `R·[x1 < t]` for a small threshold `t`.
    pub fn early_bump(&mut self) -> ResourceFunction {
        let r = self.pos_rational();
        if self.domain.is_finite() {
            return self.table(|_, _| Q::zero());
        }
        let t = self.feature_point();
        self.expr(FuncExpr::scale(r, FuncExpr::ind(cmp(x(), CmpOp::Lt, k(t)))))
    }

    /// Multiplier `u` for the homogeneity properties.
    pub fn multiplier(&mut self, class: MultiplierClass) -> ResourceFunction {
        if self.domain.is_finite() {
            let n = self.finite_points().len();
            let vals: Vec<Q> = (0..n)
                .map(|_| match class {
                    MultiplierClass::Natural => Q::int(self.rng.gen_range(0..=MAX_PQ)),
                    MultiplierClass::Reciprocal => Q::new(1, self.rng.gen_range(1..=MAX_PQ)),
                    MultiplierClass::Rational => {
                        if self.rng.gen_bool(0.2) {
                            Q::zero()
                        } else {
                            self.pos_rational()
                        }
                    }
                })
                .collect();
            return self.table(|_, i| vals[i].clone());
        }
        let base = self.base().unwrap_or(Base::Naturals);
        let ax = abs_x(base);
        let e = match class {
            MultiplierClass::Natural => match self.rng.gen_range(0..5) {
                0 => k(self.rng.gen_range(0..=8)),
                1 => ax,
                2 => FuncExpr::add(ax, k(1)),
                3 => parity(),
                _ => FuncExpr::mul(ax.clone(), ax),
            },
            MultiplierClass::Reciprocal => match self.rng.gen_range(0..3) {
                0 => q(Q::new(1, self.rng.gen_range(1..=8))),
                1 => FuncExpr::pow(FuncExpr::add(ax, k(1)), Q::int(-1)),
                _ => FuncExpr::pow(FuncExpr::add(parity(), k(1)), Q::int(-1)),
            },
            MultiplierClass::Rational => match self.rng.gen_range(0..6) {
                0 => q(self.pos_rational()),
                1 => FuncExpr::scale(self.pos_rational(), ax),
                2 => FuncExpr::pow(FuncExpr::add(ax, k(1)), Q::int(-1)),
                3 => parity(),
                4 => {
                    let t = self.feature_point();
                    FuncExpr::ind(cmp(x(), CmpOp::Ge, k(t)))
                }
                _ => FuncExpr::mul(ax.clone(), ax),
            },
        };
        self.expr(e)
    }

    /// Predicates partitioning the domain into at most four parts.
    pub fn cover(&mut self) -> Vec<Predicate> {
        if self.domain.is_finite() {
            let pts = self.finite_points();
            let parts = self.rng.gen_range(1..=4usize);
            let mut groups: Vec<Vec<Point>> = vec![Vec::new(); parts];
            for p in pts {
                let g = self.rng.gen_range(0..parts);
                groups[g].push(p);
            }
            return groups.into_iter().map(|g| point_set_predicate(&g)).collect();
        }
        let t = self.feature_point();
        let lt = cmp(x(), CmpOp::Lt, k(t));
        let even = cmp(parity(), CmpOp::Eq, k(0));
        match self.rng.gen_range(0..4) {
            0 => vec![lt.clone(), Predicate::not(lt)],
            1 => vec![even.clone(), Predicate::not(even)],
            2 => vec![
                Predicate::and(lt.clone(), even.clone()),
                Predicate::and(lt.clone(), Predicate::not(even.clone())),
                Predicate::and(Predicate::not(lt.clone()), even.clone()),
                Predicate::and(Predicate::not(lt), Predicate::not(even)),
            ],
            _ => {
                let m3 = FuncExpr::sub(x(), FuncExpr::scale(Q::int(3), FuncExpr::floor(FuncExpr::scale(Q::new(1, 3), x()))));
                (0..3).map(|r| cmp(m3.clone(), CmpOp::Eq, k(r))).collect()
            }
        }
    }

    /// A random sub-domain constraint.
    pub fn subdomain(&mut self) -> Result<DomainSpec> {
        if self.domain.is_finite() {
            let pts = self.finite_points();
            let keep: Vec<Point> = pts.into_iter().filter(|_| self.rng.gen_bool(0.6)).collect();
            return DomainSpec::finite_with_dim(self.domain.dim(), keep);
        }
        let t = self.feature_point();
        let pred = match self.rng.gen_range(0..4) {
            0 => cmp(x(), CmpOp::Ge, k(t)),
            1 => cmp(parity(), CmpOp::Eq, k(1)),
            2 => cmp(x(), CmpOp::Ne, k(t)),
            _ => cmp(x(), CmpOp::Le, k(t)),
        };
        self.domain.clone().with_constraint(pred)
    }

    /// A map from the domain into itself; injective when asked.
    pub fn self_map(&mut self, injective: bool) -> MapFamily {
        let base = self.base();
        let shift = self.rng.gen_range(0..=8);
        let scale = self.rng.gen_range(1..=3);
        let families: Vec<MapFamily> = match base {
            Some(Base::Integers) => {
                let mut v = vec![
                    MapFamily::Affine { scale, shift },
                    MapFamily::Affine { scale: -scale, shift },
                    MapFamily::Affine { scale: 1, shift: -shift },
                ];
                if !injective {
                    v.extend([MapFamily::Constant(shift), MapFamily::Halve, MapFamily::Square]);
                }
                v
            }
            Some(_) => {
                let mut v = vec![MapFamily::Affine { scale, shift }];
                if !injective {
                    v.extend([
                        MapFamily::Constant(self.lower().max(0) + shift),
                        MapFamily::HalveShift(self.lower().max(0)),
                        MapFamily::Square,
                        MapFamily::ModShift { modulus: scale + 1, shift: self.lower().max(0) },
                    ]);
                }
                v
            }
            None => vec![MapFamily::Permutation(self.rng.gen())],
        };
        families.choose(&mut self.rng).unwrap().clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierClass {
    Natural,
    Rational,
    Reciprocal,
}

/// Predicate true exactly on the listed points.
pub fn point_set_predicate(points: &[Point]) -> Predicate {
    let eq_point = |p: &Point| {
        let mut it = p.iter().enumerate().map(|(j, v)| cmp(FuncExpr::coord(j + 1), CmpOp::Eq, k(*v)));
        let first = it.next().unwrap();
        it.fold(first, Predicate::and)
    };
    match points.split_first() {
        // 0 = 1 is the empty set
        None => cmp(k(0), CmpOp::Eq, k(1)),
        Some((p, rest)) => rest.iter().fold(eq_point(p), |acc, p| Predicate::or(acc, eq_point(p))),
    }
}

/// Maps used for composition properties, each with its image and (when
/// injective) an inverse on that image.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFamily {
    /// `y ↦ scale·y + shift`.
    Affine { scale: i64, shift: i64 },
    Constant(i64),
    Halve,
    HalveShift(i64),
    Square,
    ModShift { modulus: i64, shift: i64 },
    /// Random map on a finite domain, injective iff the seed says so.
    Permutation(u64),
}

impl MapFamily {
    pub fn forward(&self) -> FuncExpr {
        match self {
            MapFamily::Affine { scale, shift } => FuncExpr::add(FuncExpr::scale(Q::int(*scale), x()), k(*shift)),
            MapFamily::Constant(c) => k(*c),
            MapFamily::Halve => FuncExpr::floor(FuncExpr::scale(Q::new(1, 2), x())),
            MapFamily::HalveShift(s) => FuncExpr::add(FuncExpr::floor(FuncExpr::scale(Q::new(1, 2), x())), k(*s)),
            MapFamily::Square => FuncExpr::mul(x(), x()),
            MapFamily::ModShift { modulus, shift } => FuncExpr::add(
                FuncExpr::sub(
                    x(),
                    FuncExpr::scale(Q::int(*modulus), FuncExpr::floor(FuncExpr::scale(Q::new(1, *modulus), x()))),
                ),
                k(*shift),
            ),
            MapFamily::Permutation(_) => unreachable!("finite maps are tables"),
        }
    }

    pub fn is_injective(&self) -> bool {
        matches!(self, MapFamily::Affine { scale, .. } if *scale != 0)
    }

    /// Inverse on the image, and a predicate describing the image.
    pub fn inverse(&self) -> Option<(FuncExpr, Predicate)> {
        match self {
            MapFamily::Affine { scale, shift } if *scale != 0 => {
                let back = FuncExpr::scale(Q::new(1, *scale), FuncExpr::sub(x(), k(*shift)));
                let integral = cmp(back.clone(), CmpOp::Eq, FuncExpr::floor(back.clone()));
                Some((back, integral))
            }
            _ => None,
        }
    }

    /// Close a finite-domain map: returns the table `y ↦ s(y)` within `domain`.
    pub fn finite_table(&self, domain: &DomainSpec, injective: bool) -> CoordMap {
        let MapFamily::Permutation(seed) = self else { unreachable!() };
        let pts = domain.finite_points().unwrap_or_default().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let images: Vec<Point> = if injective {
            let mut p = pts.clone();
            p.shuffle(&mut rng);
            p
        } else {
            pts.iter().map(|_| pts.choose(&mut rng).unwrap().clone()).collect()
        };
        CoordMap::Table(pts.into_iter().zip(images).collect())
    }
}

/// Domain for random trials of a kind.
pub fn trial_domain(kind: DominanceKind, trial: usize, rng: &mut ChaCha8Rng) -> DomainSpec {
    let bases = [Base::Naturals, Base::PositiveNaturals, Base::Integers];
    let use_finite = matches!(kind, DominanceKind::Linear) && trial % 2 == 1;
    if use_finite {
        let size = rng.gen_range(0..=64usize);
        let mut pts: Vec<i64> = (-20..=40).collect();
        pts.shuffle(rng);
        pts.truncate(size);
        DomainSpec::finite(pts.into_iter().map(|v| vec![v]).collect()).unwrap()
    } else {
        DomainSpec::grid(1, bases[(trial / if kind == DominanceKind::Linear { 2 } else { 1 }) % 3])
    }
}
