//! One trial per call: build an instance for the property, decide every
//! relation it needs, and check the pointwise identities it claims.

use rand::Rng;

use super::gen::{point_set_predicate, trial_domain, trial_rng, Gen, MapFamily, MultiplierClass};
use super::{registry, InstanceGen, Instance, Leg, LegRole, Mismatch, PropertyId};
use crate::domain::{Base, DomainSpec};
use crate::dominance::{decide, replay_witness, DominanceKind, FilterParam, Verdict, Witness};
use crate::error::Error;
use crate::expr::{CmpOp, FuncExpr, Predicate};
use crate::func::{combine, expr_function, transform, CoordMap, Mode, ResourceFunction, TransformOp, Value};
use crate::num::Q;

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Pass,
    Fail(Instance),
    /// A hypothesis did not hold, or a decision came back Unknown.
    Inconclusive(String),
}

enum Stop {
    Fail(Option<Mismatch>),
    Inconclusive(String),
    Err(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Stop {
        Stop::Err(e)
    }
}

type Step<T = ()> = std::result::Result<T, Stop>;

fn s(i: usize) -> FuncExpr {
    FuncExpr::slot(i)
}

fn k(i: i64) -> FuncExpr {
    FuncExpr::int(i)
}

fn x(i: usize) -> FuncExpr {
    FuncExpr::coord(i)
}

fn gt0(e: FuncExpr) -> Predicate {
    Predicate::cmp(e, CmpOp::Gt, k(0))
}

fn recip(e: FuncExpr) -> FuncExpr {
    FuncExpr::pow(e, Q::int(-1))
}

/// `$num / $den` where the denominator is positive, `fallback` elsewhere.
fn guarded_div(num: FuncExpr, den: FuncExpr, fallback: FuncExpr) -> FuncExpr {
    FuncExpr::ite(gt0(den.clone()), FuncExpr::mul(num, recip(den)), fallback)
}

struct Ctx<'a> {
    kind: DominanceKind,
    cfg: &'a InstanceGen,
    gen: Gen,
    legs: Vec<Leg>,
    horizon: Option<u64>,
}

impl Ctx<'_> {
    fn horizon_for(&self, f: &ResourceFunction) -> u64 {
        self.horizon.unwrap_or(if f.domain().dim() >= 2 { self.cfg.horizon.min(64) } else { self.cfg.horizon })
    }

    fn decide(&mut self, role: LegRole, g: &ResourceFunction, f: &ResourceFunction) -> Step<Verdict> {
        let horizon = self.horizon_for(f);
        let verdict = decide(self.kind, g, f, horizon, &self.cfg.c_max)?;
        self.legs.push(Leg { kind: self.kind, role, g: g.clone(), f: f.clone(), horizon, verdict: verdict.clone() });
        Ok(verdict)
    }

    fn assume(&mut self, g: &ResourceFunction, f: &ResourceFunction) -> Step<Verdict> {
        let v = self.decide(LegRole::Hypothesis, g, f)?;
        match &v {
            Verdict::Holds { .. } => Ok(v),
            Verdict::Fails { .. } => Err(Stop::Inconclusive("hypothesis does not hold".into())),
            Verdict::Unknown { .. } => Err(Stop::Inconclusive("hypothesis undecided".into())),
        }
    }

    fn assert(&mut self, g: &ResourceFunction, f: &ResourceFunction) -> Step<Verdict> {
        let v = self.decide(LegRole::Conclusion, g, f)?;
        match &v {
            Verdict::Holds { .. } => Ok(v),
            Verdict::Fails { exact: true, .. } => Err(Stop::Fail(None)),
            Verdict::Fails { .. } => {
                // sampled evidence can be a late crossover; look further out before trusting it
                let far = decide(self.kind, g, f, 4 * self.horizon_for(f), &self.cfg.c_max)?;
                if far.fails() {
                    Err(Stop::Fail(None))
                } else {
                    Err(Stop::Inconclusive("failure not confirmed at a larger horizon".into()))
                }
            }
            Verdict::Unknown { .. } => Err(Stop::Inconclusive("conclusion undecided".into())),
        }
    }

    fn refute(&mut self, g: &ResourceFunction, f: &ResourceFunction) -> Step {
        let v = self.decide(LegRole::MustFail, g, f)?;
        match &v {
            Verdict::Holds { .. } => Err(Stop::Fail(None)),
            Verdict::Fails { .. } => Ok(()),
            Verdict::Unknown { .. } => Err(Stop::Inconclusive("non-dominance undecided".into())),
        }
    }

    fn equiv(&mut self, a: &ResourceFunction, b: &ResourceFunction) -> Step {
        self.assert(a, b)?;
        self.assert(b, a)?;
        Ok(())
    }

    /// Pointwise equality on the sample box.
    fn equal(&self, note: &str, lhs: &ResourceFunction, rhs: &ResourceFunction) -> Step {
        let tol = lhs.mode().join(rhs.mode()).rel_tol();
        for p in lhs.domain().points_in_box(self.horizon_for(lhs))? {
            let (a, b) = (lhs.eval(&p)?, rhs.eval(&p)?);
            if !a.eq_tol(&b, tol) {
                return Err(Stop::Fail(Some(Mismatch {
                    note: note.into(),
                    point: p,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    lhs_value: a,
                    rhs_value: b,
                })));
            }
        }
        Ok(())
    }

    fn rng(&mut self) -> &mut rand_chacha::ChaCha8Rng {
        &mut self.gen.rng
    }

    fn domain(&self) -> DomainSpec {
        self.gen.domain.clone()
    }

    fn base(&mut self) -> ResourceFunction {
        self.gen.base_function()
    }

    fn dominated(&mut self, f: &ResourceFunction) -> ResourceFunction {
        let kind = self.kind;
        self.gen.dominated(kind, f)
    }

    fn constant(&self, c: Q) -> Step<ResourceFunction> {
        on(&self.domain(), FuncExpr::Const(c))
    }
}

fn on(domain: &DomainSpec, e: FuncExpr) -> Step<ResourceFunction> {
    match domain {
        DomainSpec::Finite { .. } => {
            Ok(ResourceFunction::tabulate(domain.clone(), Mode::Exact, |p| {
                crate::func::eval_template(&e, p, &[], Mode::Exact)
            })?)
        }
        _ => Ok(expr_function(domain.clone(), e, Mode::Exact)?),
    }
}

fn tpl(template: FuncExpr, args: &[&ResourceFunction]) -> Step<ResourceFunction> {
    Ok(combine(&template, args)?)
}

fn restrict(f: &ResourceFunction, d: &DomainSpec) -> Step<ResourceFunction> {
    Ok(transform(f, TransformOp::Restrict(d.clone()))?)
}

fn float(f: &ResourceFunction) -> Step<ResourceFunction> {
    Ok(f.with_mode(Mode::float())?)
}

/// `f ∘ s` for a self-map of `f`'s domain.
fn compose(f: &ResourceFunction, map: &CoordMap) -> Step<ResourceFunction> {
    Ok(transform(f, TransformOp::ComposeRight { map: map.clone(), source: f.domain().clone() })?)
}

fn coord_map(domain: &DomainSpec, m: &MapFamily, injective: bool) -> CoordMap {
    match m {
        MapFamily::Permutation(_) => m.finite_table(domain, injective),
        _ => CoordMap::Exprs(vec![m.forward()]),
    }
}

/// Predicate describing the filter set of a witness.
fn filter_predicate(kind: DominanceKind, filter: &FilterParam, dim: usize) -> Predicate {
    let truth = Predicate::cmp(k(0), CmpOp::Eq, k(0));
    match filter {
        FilterParam::Whole => truth,
        FilterParam::Empty => Predicate::not(truth),
        FilterParam::ExcludedFinite(pts) => Predicate::not(point_set_predicate(pts)),
        FilterParam::Threshold(y) => {
            let parts: Vec<Predicate> =
                (0..dim).map(|j| Predicate::cmp(x(j + 1), CmpOp::Ge, k(y[j]))).collect();
            let join = if kind == DominanceKind::CoAsymptotic { Predicate::or } else { Predicate::and };
            parts.into_iter().reduce(join).unwrap_or(truth)
        }
    }
}

/// Witness for `f1 ⪯ f3` composed from witnesses of `f1 ⪯ f2` and `f2 ⪯ f3`.
fn compose_witness(kind: DominanceKind, a: &Witness, b: &Witness) -> Witness {
    let c = match kind {
        DominanceKind::Affine => {
            let m = a.c.clone().max(b.c.clone());
            &(&m * &m) + &m
        }
        _ => &a.c * &b.c,
    };
    let filter = match (&a.filter, &b.filter) {
        (FilterParam::Empty, _) | (_, FilterParam::Empty) => FilterParam::Empty,
        (FilterParam::Whole, other) | (other, FilterParam::Whole) => other.clone(),
        (FilterParam::ExcludedFinite(p), FilterParam::ExcludedFinite(q)) => {
            let mut all = p.clone();
            all.extend(q.iter().cloned());
            all.sort();
            all.dedup();
            FilterParam::ExcludedFinite(all)
        }
        (FilterParam::Threshold(p), FilterParam::Threshold(q)) => {
            FilterParam::Threshold(p.iter().zip(q).map(|(u, v)| *u.max(v)).collect())
        }
        _ => FilterParam::Empty,
    };
    Witness { c, filter }
}

fn multiplier_class(p: PropertyId, rng: &mut impl Rng) -> MultiplierClass {
    match p {
        PropertyId::QSubHom => MultiplierClass::Rational,
        PropertyId::NSubHom => MultiplierClass::Natural,
        PropertyId::NCancel => MultiplierClass::Reciprocal,
        _ => [MultiplierClass::Natural, MultiplierClass::Rational, MultiplierClass::Reciprocal][rng.gen_range(0..3)],
    }
}

fn random_trial(p: PropertyId, cx: &mut Ctx<'_>) -> Step {
    use PropertyId::*;
    match p {
        Order => {
            let f = cx.base();
            let w = cx.gen.weight();
            let g = tpl(FuncExpr::mul(s(0), s(1)), &[&w, &f])?;
            cx.assert(&g, &f)?;
        }
        Reflex => {
            let f = cx.base();
            cx.assert(&f, &f)?;
        }
        Trans => {
            let f3 = cx.base();
            let f2 = cx.dominated(&f3);
            let f1 = cx.dominated(&f2);
            let v12 = cx.assume(&f1, &f2)?;
            let v23 = cx.assume(&f2, &f3)?;
            cx.assert(&f1, &f3)?;
            let w = compose_witness(cx.kind, v12.witness().unwrap(), v23.witness().unwrap());
            let h = cx.horizon_for(&f3);
            if let Some(pt) = replay_witness(cx.kind, &f1, &f3, &w, h)? {
                let (a, b) = (f1.eval(&pt)?, f3.eval(&pt)?);
                return Err(Stop::Fail(Some(Mismatch {
                    note: format!("composed witness c={} violated", w.c),
                    point: pt,
                    lhs: f1,
                    rhs: f3,
                    lhs_value: a,
                    rhs_value: b,
                })));
            }
        }
        Member => {
            let f = cx.base();
            let g = cx.dominated(&f);
            cx.assume(&g, &f)?;
            for _ in 0..3 {
                let h = cx.dominated(&g);
                cx.assume(&h, &g)?;
                cx.assert(&h, &f)?;
            }
        }
        Zero => {
            let a = cx.gen.pos_rational();
            let g = cx.constant(a)?;
            let z = cx.constant(Q::zero())?;
            cx.refute(&g, &z)?;
        }
        One => {
            let (a, b) = (cx.gen.pos_rational(), cx.gen.pos_rational());
            let g = on(&cx.domain(), FuncExpr::scale(a, x(1)))?;
            let f = cx.constant(b)?;
            cx.refute(&g, &f)?;
        }
        TrivialZero => {
            let g = cx.base();
            let z = cx.constant(Q::zero())?;
            trivial_zero(cx, &g, &z)?;
        }
        Scale => {
            let f = cx.base();
            let a = cx.gen.pos_rational();
            let g = tpl(FuncExpr::scale(a, s(0)), &[&f])?;
            cx.equiv(&f, &g)?;
        }
        Translation => {
            let f = cx.gen.positive_function();
            let a = cx.gen.pos_rational();
            let g = tpl(FuncExpr::add(s(0), FuncExpr::Const(a)), &[&f])?;
            cx.equiv(&g, &f)?;
        }
        PowerH => {
            let alpha = [Q::int(2), Q::int(3), Q::new(1, 2), Q::new(3, 2), Q::new(2, 3)][cx.rng().gen_range(0..5)].clone();
            let f = float(&cx.base())?;
            let g = float(&cx.dominated(&f))?;
            cx.assume(&g, &f)?;
            let pw = |e: &ResourceFunction, a: &Q| tpl(FuncExpr::pow(s(0), a.clone()), &[e]);
            cx.assert(&pw(&g, &alpha)?, &pw(&f, &alpha)?)?;
            let fa = pw(&f, &alpha)?;
            let hh = float(&cx.dominated(&fa))?;
            cx.assume(&hh, &fa)?;
            let root = pw(&hh, &alpha.recip())?;
            cx.assert(&root, &f)?;
            cx.equal("power of the root", &pw(&root, &alpha)?, &hh)?;
        }
        AddCons => {
            let (u, v) = (cx.gen.pos_rational(), cx.gen.pos_rational());
            let f = cx.base();
            let g1 = cx.dominated(&f);
            let g2 = cx.dominated(&f);
            cx.assume(&g1, &f)?;
            cx.assume(&g2, &f)?;
            let lhs = tpl(FuncExpr::add(FuncExpr::scale(u.clone(), s(0)), FuncExpr::scale(v.clone(), s(1))), &[&g1, &g2])?;
            let uv = &u + &v;
            let rhs = tpl(FuncExpr::scale(uv.clone(), s(0)), &[&f])?;
            cx.assert(&lhs, &rhs)?;
            let hh = cx.dominated(&rhs);
            cx.assume(&hh, &rhs)?;
            let part = tpl(FuncExpr::scale(uv.recip(), s(0)), &[&hh])?;
            cx.assert(&part, &f)?;
            let back = tpl(FuncExpr::add(FuncExpr::scale(u, s(0)), FuncExpr::scale(v, s(0))), &[&part])?;
            cx.equal("split by weights", &back, &hh)?;
        }
        MultiCons => {
            let choices = [Q::new(1, 2), Q::int(1), Q::new(3, 2), Q::int(2)];
            let u = choices[cx.rng().gen_range(0..4)].clone();
            let v = choices[cx.rng().gen_range(0..4)].clone();
            let uv = &u + &v;
            let f = float(&cx.base())?;
            let g1 = float(&cx.dominated(&f))?;
            let g2 = float(&cx.dominated(&f))?;
            cx.assume(&g1, &f)?;
            cx.assume(&g2, &f)?;
            let prod = tpl(FuncExpr::mul(FuncExpr::pow(s(0), u.clone()), FuncExpr::pow(s(1), v.clone())), &[&g1, &g2])?;
            let fuv = tpl(FuncExpr::pow(s(0), uv.clone()), &[&f])?;
            cx.assert(&prod, &fuv)?;
            let hh = float(&cx.dominated(&fuv))?;
            cx.assume(&hh, &fuv)?;
            let root = tpl(FuncExpr::pow(s(0), uv.recip()), &[&hh])?;
            cx.assert(&root, &f)?;
            let back = tpl(FuncExpr::mul(FuncExpr::pow(s(0), u), FuncExpr::pow(s(0), v)), &[&root])?;
            cx.equal("product of powers", &back, &hh)?;
        }
        MaxCons => {
            let f = cx.base();
            let g1 = cx.dominated(&f);
            let g2 = cx.dominated(&f);
            cx.assume(&g1, &f)?;
            cx.assume(&g2, &f)?;
            cx.assert(&tpl(FuncExpr::max(s(0), s(1)), &[&g1, &g2])?, &f)?;
        }
        Local => {
            let f = cx.base();
            let parts = cx.gen.cover();
            let pieces: Vec<ResourceFunction> = parts.iter().map(|_| cx.dominated(&f)).collect();
            let refs: Vec<&ResourceFunction> = pieces.iter().collect();
            let glued = parts
                .iter()
                .enumerate()
                .rev()
                .fold(k(0), |acc, (j, pr)| FuncExpr::ite(pr.clone(), s(j), acc));
            let g = tpl(glued, &refs)?;
            for pr in &parts {
                let d = cx.domain().with_constraint(pr.clone())?;
                if d.is_empty() {
                    continue;
                }
                cx.assume(&restrict(&g, &d)?, &restrict(&f, &d)?)?;
            }
            cx.assert(&g, &f)?;
        }
        ScalarHom => {
            let a = cx.gen.pos_rational();
            let f = cx.base();
            let g = cx.dominated(&f);
            cx.assume(&g, &f)?;
            let sc = |e: &ResourceFunction, q: &Q| tpl(FuncExpr::scale(q.clone(), s(0)), &[e]);
            cx.assert(&sc(&g, &a)?, &sc(&f, &a)?)?;
            let af = sc(&f, &a)?;
            let hh = cx.dominated(&af);
            cx.assume(&hh, &af)?;
            cx.assert(&sc(&hh, &a.recip())?, &f)?;
        }
        SubHom | QSubHom | NSubHom | NCancel => {
            let class = multiplier_class(p, cx.rng());
            let u = cx.gen.multiplier(class);
            let f = cx.base();
            let g = cx.dominated(&f);
            cx.assume(&g, &f)?;
            let mul = FuncExpr::mul(s(0), s(1));
            cx.assert(&tpl(mul.clone(), &[&u, &g])?, &tpl(mul, &[&u, &f])?)?;
        }
        SuperHom => {
            let class = multiplier_class(p, cx.rng());
            let u = cx.gen.multiplier(class);
            let f = cx.base();
            let uf = tpl(FuncExpr::mul(s(0), s(1)), &[&u, &f])?;
            let hh = cx.dominated(&uf);
            super_hom(cx, &u, &f, &hh)?;
        }
        SubMulti => {
            let (f, g) = (cx.base(), cx.base());
            let g1 = cx.dominated(&f);
            let g2 = cx.dominated(&g);
            sub_multi(cx, &f, &g, &g1, &g2)?;
        }
        SuperMulti => {
            let (f, g) = (cx.base(), cx.base());
            let fg = tpl(FuncExpr::mul(s(0), s(1)), &[&f, &g])?;
            let hh = cx.dominated(&fg);
            let v = cx.assume(&hh, &fg)?;
            let filter = v.witness().unwrap().filter.clone();
            let (fh, gh) = match cx.kind {
                DominanceKind::Trivial => (hh.clone(), cx.constant(Q::one())?),
                DominanceKind::Affine => (
                    tpl(FuncExpr::mul(s(0), recip(FuncExpr::add(s(1), k(1)))), &[&hh, &g])?,
                    tpl(FuncExpr::add(s(0), k(1)), &[&g])?,
                ),
                kind => {
                    let a = filter_predicate(kind, &filter, f.domain().dim());
                    (
                        tpl(FuncExpr::ite(a.clone(), guarded_div(s(0), s(1), k(0)), s(0)), &[&hh, &g])?,
                        tpl(FuncExpr::ite(a, s(0), k(1)), &[&g])?,
                    )
                }
            };
            cx.assert(&fh, &f)?;
            cx.assert(&gh, &g)?;
            cx.equal("factorisation", &tpl(FuncExpr::mul(s(0), s(1)), &[&fh, &gh])?, &hh)?;
        }
        SubRestrict => {
            let f = cx.base();
            let g = cx.dominated(&f);
            cx.assume(&g, &f)?;
            let d = cx.gen.subdomain()?;
            cx.assert(&restrict(&g, &d)?, &restrict(&f, &d)?)?;
        }
        SuperRestrict => {
            let f = cx.base();
            let d = cx.gen.subdomain()?;
            let fd = restrict(&f, &d)?;
            let outer = std::mem::replace(&mut cx.gen.domain, d.clone());
            let hh = cx.dominated(&fd);
            cx.gen.domain = outer;
            cx.assume(&hh, &fd)?;
            let g = zero_extend(&hh, &cx.domain())?;
            cx.assert(&g, &f)?;
            cx.equal("extension restricts back", &restrict(&g, &d)?, &hh)?;
        }
        Additive => {
            let (f, g) = (cx.base(), cx.base());
            let h1 = cx.dominated(&f);
            let h2 = cx.dominated(&g);
            cx.assume(&h1, &f)?;
            cx.assume(&h2, &g)?;
            let add = FuncExpr::add(s(0), s(1));
            let fg = tpl(add.clone(), &[&f, &g])?;
            cx.assert(&tpl(add.clone(), &[&h1, &h2])?, &fg)?;
            let hh = cx.dominated(&fg);
            cx.assume(&hh, &fg)?;
            let half = FuncExpr::scale(Q::new(1, 2), s(0));
            let share = |own: usize| {
                guarded_div(FuncExpr::mul(s(0), s(own)), FuncExpr::add(s(1), s(2)), half.clone())
            };
            let a = tpl(share(1), &[&hh, &f, &g])?;
            let b = tpl(share(2), &[&hh, &f, &g])?;
            cx.assert(&a, &f)?;
            cx.assert(&b, &g)?;
            cx.equal("proportional split", &tpl(add, &[&a, &b])?, &hh)?;
        }
        Summation => {
            let (f, g) = (cx.base(), cx.base());
            let sum = tpl(FuncExpr::add(s(0), s(1)), &[&f, &g])?;
            let mx = tpl(FuncExpr::max(s(0), s(1)), &[&f, &g])?;
            cx.equiv(&sum, &mx)?;
        }
        Maximum => {
            let (f, g) = (cx.base(), cx.base());
            let h1 = cx.dominated(&f);
            let h2 = cx.dominated(&g);
            cx.assume(&h1, &f)?;
            cx.assume(&h2, &g)?;
            let mx = FuncExpr::max(s(0), s(1));
            let fg = tpl(mx.clone(), &[&f, &g])?;
            cx.assert(&tpl(mx.clone(), &[&h1, &h2])?, &fg)?;
            let hh = cx.dominated(&fg);
            cx.assume(&hh, &fg)?;
            let ge = Predicate::cmp(s(1), CmpOp::Ge, s(2));
            let a = tpl(FuncExpr::ite(ge.clone(), s(0), k(0)), &[&hh, &f, &g])?;
            let b = tpl(FuncExpr::ite(ge, k(0), s(0)), &[&hh, &f, &g])?;
            cx.assert(&a, &f)?;
            cx.assert(&b, &g)?;
            cx.equal("split by the larger side", &tpl(mx, &[&a, &b])?, &hh)?;
        }
        MaximumSum => {
            let (f, g) = (cx.base(), cx.base());
            let g1 = cx.dominated(&f);
            let g2 = cx.dominated(&g);
            cx.assume(&g1, &f)?;
            cx.assume(&g2, &g)?;
            let ge = Predicate::cmp(s(0), CmpOp::Ge, s(1));
            let sum = FuncExpr::add(s(0), s(1));
            let a = tpl(FuncExpr::ite(ge.clone(), sum.clone(), k(0)), &[&g1, &g2])?;
            let b = tpl(FuncExpr::ite(ge.clone(), k(0), sum.clone()), &[&g1, &g2])?;
            cx.assert(&a, &f)?;
            cx.assert(&b, &g)?;
            cx.equal("sum as a maximum", &tpl(FuncExpr::max(s(0), s(1)), &[&a, &b])?, &tpl(sum.clone(), &[&g1, &g2])?)?;
            let a2 = tpl(FuncExpr::ite(ge.clone(), s(0), k(0)), &[&g1, &g2])?;
            let b2 = tpl(FuncExpr::ite(ge, k(0), s(1)), &[&g1, &g2])?;
            cx.assert(&a2, &f)?;
            cx.assert(&b2, &g)?;
            cx.equal("maximum as a sum", &tpl(sum, &[&a2, &b2])?, &tpl(FuncExpr::max(s(0), s(1)), &[&g1, &g2])?)?;
        }
        SubComp | ISubComp => {
            let injective = p == ISubComp;
            let f = cx.base();
            let g = cx.dominated(&f);
            cx.assume(&g, &f)?;
            let m = cx.gen.self_map(injective);
            let map = coord_map(&cx.domain(), &m, injective);
            cx.assert(&compose(&g, &map)?, &compose(&f, &map)?)?;
        }
        ISuperComp => {
            let f = cx.base();
            let m = cx.gen.self_map(true);
            let map = coord_map(&cx.domain(), &m, true);
            let fs = compose(&f, &map)?;
            let hh = cx.dominated(&fs);
            cx.assume(&hh, &fs)?;
            let g = pull_back(&hh, &m, &map)?;
            cx.assert(&g, &f)?;
            cx.equal("inverse image composes back", &compose(&g, &map)?, &hh)?;
        }
        SubsetSum => {
            let w = cx.domain();
            let h = cx.base();
            let hh = cx.dominated(&h);
            let base = w.base().unwrap_or(Base::Naturals);
            let y = x(1);
            let i = FuncExpr::Index;
            let count = match cx.rng().gen_range(0..4) {
                0 => FuncExpr::add(FuncExpr::min(y.clone(), k(8)), k(1)),
                1 => k(2),
                2 => FuncExpr::add(super::gen::parity(), k(1)),
                _ => k(3),
            };
            let weight = match cx.rng().gen_range(0..3) {
                0 => k(1),
                1 => FuncExpr::Const(Q::new(1, 2)),
                _ => FuncExpr::add(FuncExpr::ind(Predicate::cmp(i.clone(), CmpOp::Eq, k(0))), k(1)),
            };
            let lift = if base == Base::PositiveNaturals { 1 } else { 0 };
            let target = match (base, cx.rng().gen_range(0..3)) {
                (Base::Integers, 0) => FuncExpr::sub(i.clone(), y.clone()),
                (Base::Integers, 1) => FuncExpr::scale(Q::int(-1), i.clone()),
                (_, 0) => FuncExpr::add(i.clone(), k(lift)),
                (_, 1) => FuncExpr::add(FuncExpr::add(y.clone(), i.clone()), k(lift)),
                _ => FuncExpr::add(FuncExpr::add(FuncExpr::floor(FuncExpr::scale(Q::new(1, 2), y)), i), k(lift)),
            };
            let op = SumOp { count, weight, map: vec![target], source: DomainSpec::naturals() };
            subset_sum(cx, &op, &hh, &h)?;
        }
        Lattice => {
            let (f, g) = (cx.base(), cx.base());
            let mx = tpl(FuncExpr::max(s(0), s(1)), &[&f, &g])?;
            let mn = tpl(FuncExpr::min(s(0), s(1)), &[&f, &g])?;
            cx.assert(&f, &mx)?;
            cx.assert(&g, &mx)?;
            cx.assert(&mn, &f)?;
            cx.assert(&mn, &g)?;
        }
    }
    Ok(())
}

fn trivial_zero(cx: &mut Ctx<'_>, g: &ResourceFunction, zero: &ResourceFunction) -> Step {
    let v = cx.decide(LegRole::Hypothesis, g, zero)?;
    match v {
        Verdict::Holds { .. } => cx.equal("only zero is dominated by zero", g, zero),
        Verdict::Fails { .. } => Ok(()),
        Verdict::Unknown { .. } => Err(Stop::Inconclusive("undecided".into())),
    }
}

fn super_hom(cx: &mut Ctx<'_>, u: &ResourceFunction, f: &ResourceFunction, hh: &ResourceFunction) -> Step {
    let uf = tpl(FuncExpr::mul(s(0), s(1)), &[u, f])?;
    cx.assume(hh, &uf)?;
    let gh = tpl(guarded_div(s(1), s(0), k(0)), &[u, hh])?;
    cx.assert(&gh, f)?;
    cx.equal("multiplier times quotient", &tpl(FuncExpr::mul(s(0), s(1)), &[u, &gh])?, hh)
}

fn sub_multi(
    cx: &mut Ctx<'_>,
    f: &ResourceFunction,
    g: &ResourceFunction,
    g1: &ResourceFunction,
    g2: &ResourceFunction,
) -> Step {
    cx.assume(g1, f)?;
    cx.assume(g2, g)?;
    let mul = FuncExpr::mul(s(0), s(1));
    cx.assert(&tpl(mul.clone(), &[g1, g2])?, &tpl(mul, &[f, g])?)?;
    Ok(())
}

/// `ĥ` on a sub-domain extended by zero to `outer`.
fn zero_extend(hh: &ResourceFunction, outer: &DomainSpec) -> Step<ResourceFunction> {
    let inner = hh.domain().clone();
    match (outer, &inner, hh.expr()) {
        (DomainSpec::Grid { .. }, DomainSpec::Grid { constraint, .. }, Some(e)) => {
            let e = match constraint {
                Some(pr) => FuncExpr::ite(pr.clone(), e.clone(), k(0)),
                None => e.clone(),
            };
            Ok(expr_function(outer.clone(), e, hh.mode())?)
        }
        (DomainSpec::Finite { .. }, _, _) => Ok(ResourceFunction::tabulate(outer.clone(), hh.mode(), |p| {
            if inner.contains(p)? {
                hh.eval(p)
            } else {
                Ok(Value::int(0))
            }
        })?),
        _ => Err(Stop::Inconclusive("cannot extend".into())),
    }
}

/// `ĥ ∘ s⁻¹` on the image of an injective self-map, zero elsewhere.
fn pull_back(hh: &ResourceFunction, m: &MapFamily, map: &CoordMap) -> Step<ResourceFunction> {
    let domain = hh.domain().clone();
    match map {
        CoordMap::Table(rows) => {
            let rows = rows.clone();
            Ok(ResourceFunction::tabulate(domain, hh.mode(), |p| {
                match rows.iter().find(|r| r.1.as_slice() == p) {
                    Some(r) => hh.eval(&r.0),
                    None => Ok(Value::int(0)),
                }
            })?)
        }
        CoordMap::Exprs(_) => {
            let (back, integral) = m.inverse().ok_or_else(|| Stop::Inconclusive("not invertible".into()))?;
            let lower = domain.base().map(|b| b.lower(0)).filter(|_| domain.base() != Some(Base::Integers));
            let image = match lower {
                Some(lo) => Predicate::and(integral, Predicate::cmp(back.clone(), CmpOp::Ge, k(lo))),
                None => integral,
            };
            let e = hh.expr().ok_or_else(|| Stop::Inconclusive("table body".into()))?;
            let pulled = FuncExpr::ite(image, e.subst_coords(&[back]), k(0));
            Ok(expr_function(domain, pulled, hh.mode())?)
        }
    }
}

/// Weighted sum over the fibres of `y ↦ {map(y, i) : i < count(y)}`.
struct SumOp {
    count: FuncExpr,
    weight: FuncExpr,
    map: Vec<FuncExpr>,
    source: DomainSpec,
}

impl SumOp {
    fn apply(&self, body: &ResourceFunction) -> Step<ResourceFunction> {
        let e = body.expr().ok_or_else(|| Stop::Inconclusive("table body".into()))?;
        let sum = FuncExpr::SubsetSum {
            count: Box::new(self.count.clone()),
            weight: Box::new(self.weight.clone()),
            map: self.map.clone(),
            body: Box::new(e.clone()),
        };
        Ok(expr_function(self.source.clone(), sum, body.mode())?)
    }
}

fn subset_sum(cx: &mut Ctx<'_>, op: &SumOp, hh: &ResourceFunction, h: &ResourceFunction) -> Step {
    cx.assume(hh, h)?;
    cx.assert(&op.apply(hh)?, &op.apply(h)?)?;
    Ok(())
}

/// Registry case backing the first trial of a cell, if any.
pub fn canonical_ref(p: PropertyId, kind: DominanceKind) -> Option<&'static str> {
    use DominanceKind::*;
    use PropertyId::*;
    Some(match (p, kind) {
        (SubComp, Cofinite | Asymptotic | CoAsymptotic) => "even-zero-subcomp",
        (SubsetSum, Cofinite) => "even-zero-subcomp",
        (ISubComp, Asymptotic) => "strip-N2-isubcomp",
        (ISubComp, CoAsymptotic) | (SubsetSum, CoAsymptotic) => "negatives-Z-isubcomp",
        (SubHom | QSubHom | NSubHom | SubMulti, Affine) => "affine-subhom",
        (SuperHom, Affine | Trivial) => "affine-superhom",
        (Zero, Affine) => "affine-zero",
        (SubsetSum, Asymptotic) => "howell-subset-sum",
        (SubsetSum, Affine) => "affine-subset-sum",
        (TrivialZero, Cofinite | Asymptotic | CoAsymptotic | Affine | Trivial) => "zero-at-origin",
        (SuperHom, Cofinite | Asymptotic | CoAsymptotic | Linear) => "vanishing-multiplier",
        _ => return None,
    })
}

fn fx(domain: &str, body: &str) -> Step<ResourceFunction> {
    Ok(registry::fx(domain, body)?)
}

/// The fixed instance behind a registry reference.
fn canonical_trial(p: PropertyId, cx: &mut Ctx<'_>) -> Step {
    use PropertyId::*;
    let r = canonical_ref(p, cx.kind).unwrap();
    match (p, r) {
        (SubComp, _) => {
            let c = registry::even_zero()?;
            cx.assume(&c.g_hat, &c.g)?;
            cx.assert(&compose(&c.g_hat, &c.map)?, &compose(&c.g, &c.map)?)?;
        }
        (SubsetSum, "even-zero-subcomp") => {
            let c = registry::even_zero()?;
            let CoordMap::Exprs(m) = &c.map else { unreachable!() };
            let op = SumOp { count: k(1), weight: k(1), map: m.clone(), source: DomainSpec::naturals() };
            subset_sum(cx, &op, &c.g_hat, &c.g)?;
        }
        (ISubComp, "strip-N2-isubcomp") => {
            let c = registry::strip_n2()?;
            cx.horizon = Some(64);
            cx.assume(&c.f, &c.one)?;
            cx.horizon = None;
            let fs = transform(&c.f, TransformOp::ComposeRight { map: c.map.clone(), source: DomainSpec::naturals() })?;
            let os = transform(&c.one, TransformOp::ComposeRight { map: c.map.clone(), source: DomainSpec::naturals() })?;
            cx.assert(&fs, &os)?;
        }
        (ISubComp, _) => {
            let c = registry::negatives_z()?;
            cx.assume(&c.f, &c.one)?;
            let src = DomainSpec::naturals();
            let fs = transform(&c.f, TransformOp::ComposeRight { map: c.map.clone(), source: src.clone() })?;
            let os = transform(&c.one, TransformOp::ComposeRight { map: c.map.clone(), source: src })?;
            cx.assert(&fs, &os)?;
        }
        (SubsetSum, "negatives-Z-isubcomp") => {
            let c = registry::negatives_z()?;
            let CoordMap::Exprs(m) = &c.map else { unreachable!() };
            let op = SumOp { count: k(1), weight: k(1), map: m.clone(), source: DomainSpec::naturals() };
            subset_sum(cx, &op, &c.f, &c.one)?;
        }
        (SubsetSum, "howell-subset-sum") => {
            let c = registry::howell()?;
            cx.horizon = Some(32);
            let op = SumOp {
                count: FuncExpr::add(x(1), k(1)),
                weight: k(1),
                map: vec![FuncExpr::Index, x(2)],
                source: c.g.domain().clone(),
            };
            subset_sum(cx, &op, &c.g_hat, &c.g)?;
        }
        (SubsetSum, _) => {
            let hh = fx("N", "1")?;
            let h = fx("N", "0")?;
            let op = SumOp { count: x(1), weight: k(1), map: vec![FuncExpr::Index], source: DomainSpec::naturals() };
            subset_sum(cx, &op, &hh, &h)?;
        }
        (SubMulti, _) => {
            let f = fx("N+", "pow(n, -1)")?;
            let g = fx("N+", "n")?;
            let one = fx("N+", "1")?;
            sub_multi(cx, &f, &g, &one, &g)?;
        }
        (SubHom | QSubHom | NSubHom, _) => {
            let c = registry::affine_subhom()?;
            cx.assume(&c.g, &c.f)?;
            let mul = FuncExpr::mul(s(0), s(1));
            cx.assert(&tpl(mul.clone(), &[&c.u, &c.g])?, &tpl(mul, &[&c.u, &c.f])?)?;
        }
        (SuperHom, "affine-superhom") => {
            let c = registry::affine_superhom()?;
            super_hom(cx, &c.u, &c.f, &c.h_hat)?;
        }
        (SuperHom, _) => {
            let u = fx("N", "ind(n >= 1)")?;
            let f = fx("N", "1")?;
            let hh = fx("N", "1")?;
            super_hom(cx, &u, &f, &hh)?;
        }
        (Zero, _) => {
            let c = fx("N+", "1")?;
            let z = fx("N+", "0")?;
            cx.refute(&c, &z)?;
        }
        (TrivialZero, _) => {
            let g = fx("N", "ind(n = 0)")?;
            let z = fx("N", "0")?;
            trivial_zero(cx, &g, &z)?;
        }
        _ => unreachable!("no canonical instance for {p} under {}", cx.kind),
    }
    Ok(())
}

fn trial_domain_for(p: PropertyId, kind: DominanceKind, trial: usize, rng: &mut rand_chacha::ChaCha8Rng) -> DomainSpec {
    match p {
        PropertyId::Zero | PropertyId::One => DomainSpec::grid(1, Base::PositiveNaturals),
        PropertyId::SubsetSum => {
            let d = trial_domain(kind, trial, rng);
            if d.is_finite() {
                DomainSpec::naturals()
            } else {
                d
            }
        }
        _ => trial_domain(kind, trial, rng),
    }
}

/// Run trial number `trial` of a cell. Trial 0 is the fixed counterexample
/// when the cell has one.
pub fn run_trial(p: PropertyId, kind: DominanceKind, cfg: &InstanceGen, trial: usize) -> crate::error::Result<TrialOutcome> {
    let kind_ix = DominanceKind::ALL.iter().position(|k| *k == kind).unwrap();
    let mut rng = trial_rng(cfg.seed, p.index(), kind_ix, trial);
    let domain = trial_domain_for(p, kind, trial, &mut rng);
    let mut cx = Ctx { kind, cfg, gen: Gen::new(rng, domain), legs: Vec::new(), horizon: None };
    let canonical = trial == 0 && canonical_ref(p, kind).is_some();
    let res = if canonical { canonical_trial(p, &mut cx) } else { random_trial(p, &mut cx) };
    let description = if canonical {
        format!("{p} under {kind}: {}", canonical_ref(p, kind).unwrap())
    } else {
        format!("{p} under {kind}: trial {trial} on {}", cx.gen.domain)
    };
    Ok(match res {
        Ok(()) => TrialOutcome::Pass,
        Err(Stop::Fail(mismatch)) => TrialOutcome::Fail(Instance { description, legs: cx.legs, mismatch }),
        Err(Stop::Inconclusive(why)) => TrialOutcome::Inconclusive(why),
        // a fixed instance must build; random ones may hit a partial body
        Err(Stop::Err(e)) if canonical => return Err(e),
        Err(Stop::Err(e)) => TrialOutcome::Inconclusive(format!("instance rejected: {e}")),
    })
}

