//! Worst-, best- and average-case functions over a grouping `g: X → Z` of
//! a finite input domain.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{fmt_point, Error, Point, Result};
use crate::func::{CoordMap, Mode, ResourceFunction, Value};
use crate::num::Q;

/// A surjection from a finite source onto a finite target, with its fibers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    source: DomainSpec,
    target: DomainSpec,
    map: CoordMap,
    fibers: Vec<(Point, Vec<Point>)>,
}

impl Grouping {
    pub fn new(source: DomainSpec, target: DomainSpec, map: CoordMap) -> Result<Grouping> {
        let xs = source.finite_points().ok_or(Error::NotFinite)?;
        let zs = target.finite_points().ok_or(Error::NotFinite)?;
        let mut fibers: Vec<(Point, Vec<Point>)> = zs.iter().map(|z| (z.clone(), vec![])).collect();
        for x in xs {
            let z = map.apply(x)?;
            let i = target.index_of(&z).ok_or_else(|| Error::RangeEscape(x.clone()))?;
            fibers[i].1.push(x.clone());
        }
        if let Some((z, _)) = fibers.iter().find(|f| f.1.is_empty()) {
            return Err(Error::Invalid(format!("grouping misses {}", fmt_point(z))));
        }
        Ok(Grouping { source, target, map, fibers })
    }

    /// Group the points of `source` by the listed coordinates.
    pub fn by_coords(source: DomainSpec, coords: &[usize]) -> Result<Grouping> {
        let xs = source.finite_points().ok_or(Error::NotFinite)?;
        let rows: Vec<(Point, Point)> = xs.iter().map(|x| (x.clone(), coords.iter().map(|&c| x[c]).collect())).collect();
        let zs: Vec<Point> = rows.iter().map(|r| r.1.clone()).unique().collect();
        let target = DomainSpec::finite_with_dim(coords.len(), zs)?;
        Grouping::new(source, target, CoordMap::Table(rows))
    }

    pub fn source(&self) -> &DomainSpec {
        &self.source
    }

    pub fn target(&self) -> &DomainSpec {
        &self.target
    }

    pub fn map(&self) -> &CoordMap {
        &self.map
    }

    /// `(z, g⁻¹({z}))` in target order.
    pub fn fibers(&self) -> &[(Point, Vec<Point>)] {
        &self.fibers
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Worst,
    Best,
}

fn check_source(f: &ResourceFunction, grouping: &Grouping) -> Result<()> {
    if f.domain() != grouping.source() {
        return Err(Error::DomainMismatch(format!("{} is not the grouping source {}", f.domain(), grouping.source())));
    }
    Ok(())
}

/// `z ↦ sup` (or `inf`) of `f` over the fiber of `z`, with one point of
/// each fiber attaining it.
pub fn case_extremes(f: &ResourceFunction, grouping: &Grouping, mode: Extreme) -> Result<(ResourceFunction, Vec<Point>)> {
    check_source(f, grouping)?;
    let mut rows = vec![];
    let mut cases = vec![];
    for (z, fiber) in grouping.fibers() {
        let mut best: Option<(Value, &Point)> = None;
        for x in fiber {
            let v = f.eval(x)?;
            let better = match &best {
                None => true,
                Some((b, _)) => match mode {
                    Extreme::Worst => v.cmp_value(b).is_gt(),
                    Extreme::Best => v.cmp_value(b).is_lt(),
                },
            };
            if better {
                best = Some((v, x));
            }
        }
        let (v, x) = best.expect("fibers are non-empty");
        rows.push((z.clone(), v));
        cases.push(x.clone());
    }
    let out = ResourceFunction::tabulate(grouping.target().clone(), f.mode(), |z| {
        Ok(rows[grouping.target().index_of(z).unwrap()].1.clone())
    })?;
    Ok((out, cases))
}

/// `z ↦ Σ w·f / Σ w` over the fiber of `z`.
pub fn average_case(f: &ResourceFunction, grouping: &Grouping, weights: &ResourceFunction) -> Result<ResourceFunction> {
    check_source(f, grouping)?;
    check_source(weights, grouping)?;
    let mut rows = vec![];
    for (z, fiber) in grouping.fibers() {
        let (mut num, mut mass) = (Value::int(0), Value::int(0));
        for x in fiber {
            let w = weights.eval(x)?;
            num = num.add(&w.mul(&f.eval(x)?));
            mass = mass.add(&w);
        }
        if mass.is_zero() {
            return Err(Error::ZeroMassFiber(z.clone()));
        }
        rows.push(num.div(&mass));
    }
    let mode = f.mode().join(weights.mode());
    ResourceFunction::tabulate(grouping.target().clone(), mode, |z| Ok(rows[grouping.target().index_of(z).unwrap()].clone()))
}

/// Constant weight 1 on the grouping source.
pub fn uniform_weights(grouping: &Grouping) -> Result<ResourceFunction> {
    ResourceFunction::tabulate(grouping.source().clone(), Mode::Exact, |_| Ok(Value::int(1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub z: Point,
    pub worst: Value,
    pub best: Value,
    pub average: Value,
    pub worst_case: Point,
    pub best_case: Point,
}

/// Worst, best and average side by side for every `z`.
pub fn case_report(f: &ResourceFunction, grouping: &Grouping, weights: &ResourceFunction) -> Result<Vec<CaseRow>> {
    let (worst, wc) = case_extremes(f, grouping, Extreme::Worst)?;
    let (best, bc) = case_extremes(f, grouping, Extreme::Best)?;
    let avg = average_case(f, grouping, weights)?;
    grouping
        .fibers()
        .iter()
        .zip(wc.into_iter().zip(bc))
        .map(|((z, _), (worst_case, best_case))| {
            Ok(CaseRow { z: z.clone(), worst: worst.eval(z)?, best: best.eval(z)?, average: avg.eval(z)?, worst_case, best_case })
        })
        .collect()
}

/// Key comparisons made by straight insertion sort on `a`.
pub fn insertion_sort_comparisons(a: &[usize]) -> u64 {
    let mut v = a.to_vec();
    let mut count = 0;
    for i in 1..v.len() {
        let key = v[i];
        let mut j = i;
        while j > 0 {
            count += 1;
            if v[j - 1] > key {
                v[j] = v[j - 1];
                j -= 1;
            } else {
                break;
            }
        }
        v[j] = key;
    }
    count
}

/// All permutations of `0..n` for `n ≤ max_len`, in lexicographic order
/// per length.
pub fn permutations_upto(max_len: usize) -> Vec<Vec<usize>> {
    (0..=max_len).flat_map(|n| (0..n).permutations(n)).collect()
}

/// Insertion-sort comparison counts on the points `(n, rank)` (the
/// `rank`-th permutation of length `n`), grouped by `n`.
pub fn insertion_sort_instance(max_len: usize) -> Result<(ResourceFunction, Grouping)> {
    let mut rows = vec![];
    for n in 0..=max_len {
        for (rank, p) in (0..n).permutations(n).enumerate() {
            rows.push((vec![n as i64, rank as i64], Value::Exact(Q::int(insertion_sort_comparisons(&p) as i64))));
        }
    }
    let source = DomainSpec::finite_with_dim(2, rows.iter().map(|r| r.0.clone()).collect())?;
    let f = crate::func::make_function(source.clone(), crate::func::BodySpec::Table(rows), Mode::Exact)?;
    let grouping = Grouping::by_coords(source, &[0])?;
    Ok((f, grouping))
}

/// Cost of the plane routine `(3n+1)(1 - sgn m) + 4` on the box
/// `0 ≤ m, n ≤ size`, grouped by `m`.
pub fn plane_instance(size: i64) -> Result<(ResourceFunction, Grouping)> {
    let pts: Vec<Point> = (0..=size).cartesian_product(0..=size).map(|(m, n)| vec![m, n]).collect();
    let source = DomainSpec::finite_with_dim(2, pts)?;
    let f = ResourceFunction::tabulate(source.clone(), Mode::Exact, |p| {
        let (m, n) = (p[0], p[1]);
        Ok(Value::int(if m == 0 { 3 * n + 1 } else { 0 } + 4))
    })?;
    let grouping = Grouping::by_coords(source, &[0])?;
    Ok((f, grouping))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inversions(a: &[usize]) -> u64 {
        a.iter().array_combinations().filter(|[x, y]| x > y).count() as u64
    }

    // inserting a[i] costs its inversions with the prefix, plus one
    // comparison unless it is a new prefix minimum
    fn oracle(a: &[usize]) -> u64 {
        let minima = (1..a.len()).filter(|&i| a[..i].iter().all(|&v| v > a[i])).count() as u64;
        inversions(a) + a.len().saturating_sub(1) as u64 - minima
    }

    #[test]
    fn comparison_count_matches_oracle() {
        for p in permutations_upto(6) {
            assert_eq!(insertion_sort_comparisons(&p), oracle(&p), "{p:?}");
        }
    }

    #[test]
    fn insertion_sort_extremes() {
        let (f, g) = insertion_sort_instance(5).unwrap();
        let (worst, _) = case_extremes(&f, &g, Extreme::Worst).unwrap();
        let (best, _) = case_extremes(&f, &g, Extreme::Best).unwrap();
        for n in 1..=5i64 {
            assert_eq!(worst.eval(&[n]).unwrap(), Value::int(n * (n - 1) / 2));
            assert_eq!(best.eval(&[n]).unwrap(), Value::int(n - 1));
        }
    }

    #[test]
    fn average_over_three() {
        let (f, g) = insertion_sort_instance(3).unwrap();
        let avg = average_case(&f, &g, &uniform_weights(&g).unwrap()).unwrap();
        let total: u64 = (0..3).permutations(3).map(|p| oracle(&p)).sum();
        assert_eq!(avg.eval(&[3]).unwrap(), Value::Exact(Q::new(total as i64, 6)));
    }

    #[test]
    fn plane_worst_case() {
        let (f, g) = plane_instance(10).unwrap();
        let (worst, cases) = case_extremes(&f, &g, Extreme::Worst).unwrap();
        assert_eq!(worst.eval(&[0]).unwrap(), Value::int(35));
        assert_eq!(cases[0], vec![0, 10]);
        for m in 1..=10 {
            assert_eq!(worst.eval(&[m]).unwrap(), Value::int(4));
        }
    }

    #[test]
    fn degenerate_groupings() {
        let src = DomainSpec::range(0, 5);
        let f = ResourceFunction::tabulate(src.clone(), Mode::Exact, |p| Ok(Value::int(p[0] * p[0]))).unwrap();
        let g = Grouping::by_coords(src.clone(), &[0]).unwrap();
        let avg = average_case(&f, &g, &uniform_weights(&g).unwrap()).unwrap();
        assert_eq!(avg.eval(&[4]).unwrap(), Value::int(16));
        let zero = ResourceFunction::tabulate(src.clone(), Mode::Exact, |_| Ok(Value::int(0))).unwrap();
        assert!(matches!(average_case(&f, &g, &zero), Err(Error::ZeroMassFiber(_))));
        let bad = Grouping::new(src, DomainSpec::range(0, 6), CoordMap::Table((0..=5).map(|v| (vec![v], vec![v])).collect()));
        assert!(bad.is_err());
    }
}
