//! Finite preorders, the equivalence `~` they induce, down-sets, and
//! classification of maps between preorders (monotone, reflecting,
//! residuated and the partition-level injective/surjective notions).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A preorder on `labels`, stored as its relation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePreorder {
    labels: Vec<String>,
    /// `le[x][y]` iff `x ⪯ y`.
    le: Vec<Vec<bool>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col: 1, msg: msg.into() }
}

impl FinitePreorder {
    /// Validate a relation matrix: it must be reflexive and transitive.
    pub fn new(labels: Vec<String>, le: Vec<Vec<bool>>) -> Result<FinitePreorder> {
        let n = labels.len();
        if le.len() != n || le.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("relation matrix does not match the element count".into()));
        }
        let mut seen = labels.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("element labels must be distinct".into()));
        }
        if let Some(x) = (0..n).find(|&x| !le[x][x]) {
            return Err(Error::Invalid(format!("relation is not reflexive at {}", labels[x])));
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if le[x][y] && le[y][z] && !le[x][z] {
                        return Err(Error::Invalid(format!(
                            "relation is not transitive: {} ⪯ {} ⪯ {}",
                            labels[x], labels[y], labels[z]
                        )));
                    }
                }
            }
        }
        Ok(FinitePreorder { labels, le })
    }

    /// The reflexive-transitive closure of `pairs` (given as `x ⪯ y`).
    pub fn from_pairs(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<FinitePreorder> {
        let n = labels.len();
        let mut le = vec![vec![false; n]; n];
        for (x, row) in le.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::Invalid(format!("pair ({x}, {y}) is out of range")));
            }
            le[x][y] = true;
        }
        for k in 0..n {
            for x in 0..n {
                if le[x][k] {
                    for y in 0..n {
                        if le[k][y] {
                            le[x][y] = true;
                        }
                    }
                }
            }
        }
        FinitePreorder::new(labels, le)
    }

    /// A chain `0 ⪯ 1 ⪯ … ⪯ n-1`.
    pub fn chain(n: usize) -> FinitePreorder {
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePreorder::from_pairs(numbered(n), &pairs).unwrap()
    }

    /// Text format: an `elements` line listing labels, then relation pairs
    /// `x <= y`, separated by newlines or commas. `#` starts a comment.
    pub fn parse(text: &str) -> Result<FinitePreorder> {
        let mut labels: Option<Vec<String>> = None;
        let mut pairs = vec![];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("elements") {
                if labels.is_some() {
                    return Err(parse_err(i + 1, "duplicate elements line"));
                }
                let rest = rest.trim_start_matches(':');
                labels = Some(rest.split([',', ' ']).filter(|s| !s.is_empty()).map(str::to_string).collect());
                continue;
            }
            let names = labels.as_ref().ok_or_else(|| parse_err(i + 1, "relation before the elements line"))?;
            for rel in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (a, b) = rel.split_once("<=").ok_or_else(|| parse_err(i + 1, format!("expected `x <= y`, got {rel:?}")))?;
                let find = |s: &str| {
                    names.iter().position(|l| l == s.trim()).ok_or_else(|| parse_err(i + 1, format!("unknown element {:?}", s.trim())))
                };
                pairs.push((find(a)?, find(b)?));
            }
        }
        let labels = labels.ok_or_else(|| parse_err(1, "missing elements line"))?;
        FinitePreorder::from_pairs(labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.le[x][y]
    }

    /// `x ~ y`: each below the other.
    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.le[x][y] && self.le[y][x]
    }

    /// The same elements with the order reversed.
    pub fn transpose(&self) -> FinitePreorder {
        let n = self.len();
        let le = (0..n).map(|x| (0..n).map(|y| self.le[y][x]).collect()).collect();
        FinitePreorder { labels: self.labels.clone(), le }
    }

    /// `↓D = {x : ∃ d ∈ D, x ⪯ d}`.
    pub fn generate(&self, d: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&x| d.iter().any(|&e| self.le[x][e])).collect()
    }

    pub fn principal(&self, d: usize) -> Vec<usize> {
        self.generate(&[d])
    }

    /// `D = ↓D`.
    pub fn is_down_set_by_closure(&self, d: &[usize]) -> bool {
        self.generate(d) == normalize(d)
    }

    /// Everything below a member is a member.
    pub fn is_down_set_by_membership(&self, d: &[usize]) -> bool {
        let inside = self.mask(d);
        d.iter().all(|&e| (0..self.len()).all(|x| !self.le[x][e] || inside[x]))
    }

    pub fn is_down_set(&self, d: &[usize]) -> bool {
        let a = self.is_down_set_by_closure(d);
        debug_assert_eq!(a, self.is_down_set_by_membership(d));
        a
    }

    /// A generator `d` with `D = ↓{d}`, if any.
    pub fn is_principal(&self, d: &[usize]) -> Option<usize> {
        let d = normalize(d);
        (0..self.len()).find(|&e| self.principal(e) == d)
    }

    /// All down-sets, as sorted index lists in order of their bitmask.
    pub fn enumerate_down_sets(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        assert!(n < 32, "enumeration is exponential");
        (0u32..1 << n).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>()).filter(|d| self.is_down_set(d)).collect()
    }

    fn mask(&self, d: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &e in d {
            m[e] = true;
        }
        m
    }
}

impl fmt::Display for FinitePreorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements {}", self.labels.join(" "))?;
        for x in 0..self.len() {
            for y in 0..self.len() {
                if x != y && self.le[x][y] {
                    writeln!(f, "{} <= {}", self.labels[x], self.labels[y])?;
                }
            }
        }
        Ok(())
    }
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn normalize(d: &[usize]) -> Vec<usize> {
    let mut d = d.to_vec();
    d.sort_unstable();
    d.dedup();
    d
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DownSetQuery {
    Generate(Vec<usize>),
    IsDownSet(Vec<usize>),
    IsPrincipal(Vec<usize>),
    EnumerateAll,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DownSetAnswer {
    Set(Vec<usize>),
    Bool(bool),
    Generator(Option<usize>),
    All(Vec<Vec<usize>>),
}

pub fn down_sets(p: &FinitePreorder, query: &DownSetQuery) -> DownSetAnswer {
    match query {
        DownSetQuery::Generate(d) => DownSetAnswer::Set(p.generate(d)),
        DownSetQuery::IsDownSet(d) => DownSetAnswer::Bool(p.is_down_set(d)),
        DownSetQuery::IsPrincipal(d) => DownSetAnswer::Generator(p.is_principal(d)),
        DownSetQuery::EnumerateAll => DownSetAnswer::All(p.enumerate_down_sets()),
    }
}

/// Every preorder on `{0, …, n-1}`, as relation matrices.
pub fn all_preorders(n: usize) -> Vec<FinitePreorder> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect();
    assert!(off.len() < 32, "enumeration is exponential");
    let mut out = vec![];
    for m in 0u32..1 << off.len() {
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(x, y)) in off.iter().enumerate() {
            le[x][y] = m >> k & 1 == 1;
        }
        if let Ok(p) = FinitePreorder::new(numbered(n), le) {
            out.push(p);
        }
    }
    out
}

/// Every total map `{0..n} → {0..m}` as a vector of images.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |y| [v.clone(), vec![y]].concat())).collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapClassification {
    pub order_preserving: bool,
    pub order_reflecting: bool,
    pub order_embedding: bool,
    pub p_preserving: bool,
    pub p_injective: bool,
    pub p_surjective: bool,
    pub p_bijective: bool,
    pub residuated: bool,
    pub residual: Option<Vec<usize>>,
    pub anti_residuated: bool,
    pub anti_residual: Option<Vec<usize>>,
    pub order_isomorphism: bool,
}

fn check_map(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Result<()> {
    if h.len() != p.len() || h.iter().any(|&y| y >= q.len()) {
        return Err(Error::Invalid("map must send every element of P into Q".into()));
    }
    Ok(())
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

pub fn order_preserving(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    pairs(p.len()).all(|(a, b)| !p.le(a, b) || q.le(h[a], h[b]))
}

pub fn order_reflecting(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    pairs(p.len()).all(|(a, b)| !q.le(h[a], h[b]) || p.le(a, b))
}

pub fn p_preserving(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    pairs(p.len()).all(|(a, b)| !p.equiv(a, b) || q.equiv(h[a], h[b]))
}

pub fn p_injective(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    pairs(p.len()).all(|(a, b)| !q.equiv(h[a], h[b]) || p.equiv(a, b))
}

pub fn p_surjective(q: &FinitePreorder, h: &[usize]) -> bool {
    (0..q.len()).all(|y| h.iter().any(|&fx| q.equiv(fx, y)))
}

/// `ĥ` with `h(x) ⪯ y ⟺ x ⪯ ĥ(y)`, found by trying every candidate per `y`.
///
/// The condition splits over `y`, so the per-`y` search covers every map
/// `Q → P`.
pub fn residual_of(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Option<Vec<usize>> {
    (0..q.len())
        .map(|y| (0..p.len()).find(|&r| (0..p.len()).all(|x| q.le(h[x], y) == p.le(x, r))))
        .collect()
}

/// Residuation through preimages: `h⁻¹(↓y)` is principal for every `y`;
/// its generator is a residual.
pub fn residual_by_preimages(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Option<Vec<usize>> {
    (0..q.len())
        .map(|y| {
            let down = q.principal(y);
            let pre: Vec<usize> = (0..p.len()).filter(|&x| down.contains(&h[x])).collect();
            p.is_principal(&pre)
        })
        .collect()
}

/// Residual in the transposed orders.
pub fn anti_residual_of(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Option<Vec<usize>> {
    residual_of(&p.transpose(), &q.transpose(), h)
}

/// Order preservation through preimages: every down-set pulls back to a
/// down-set.
pub fn preserving_by_preimages(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    q.enumerate_down_sets().iter().all(|d| {
        let pre: Vec<usize> = (0..p.len()).filter(|&x| d.contains(&h[x])).collect();
        p.is_down_set(&pre)
    })
}

/// A map `g: Q → P` with `g(h(x)) ~ x` and `h(g(y)) ~ y`, if one exists.
pub fn p_inverse(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Option<Vec<usize>> {
    let g: Vec<usize> = (0..q.len()).map(|y| (0..p.len()).find(|&x| q.equiv(h[x], y))).collect::<Option<_>>()?;
    (0..p.len()).all(|x| p.equiv(g[h[x]], x)).then_some(g)
}

/// p-preserving with a p-preserving p-inverse, by search over all maps
/// `Q → P`.
pub fn is_p_isomorphism(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> bool {
    p_preserving(p, q, h)
        && all_maps(q.len(), p.len()).iter().any(|g| {
            (0..p.len()).all(|x| p.equiv(g[h[x]], x)) && (0..q.len()).all(|y| q.equiv(h[g[y]], y)) && p_preserving(q, p, g)
        })
}

pub fn classify_map(p: &FinitePreorder, q: &FinitePreorder, h: &[usize]) -> Result<MapClassification> {
    check_map(p, q, h)?;
    let residual = residual_of(p, q, h);
    let by_preimage = residual_by_preimages(p, q, h);
    if residual.is_some() != by_preimage.is_some() {
        return Err(Error::Invalid("residual criteria disagree".into()));
    }
    let anti_residual = anti_residual_of(p, q, h);
    let order_preserving = order_preserving(p, q, h);
    let order_reflecting = order_reflecting(p, q, h);
    let p_injective = p_injective(p, q, h);
    let p_surjective = p_surjective(q, h);
    let order_embedding = order_preserving && order_reflecting;
    let p_bijective = p_injective && p_surjective;
    Ok(MapClassification {
        order_preserving,
        order_reflecting,
        order_embedding,
        p_preserving: p_preserving(p, q, h),
        p_injective,
        p_surjective,
        p_bijective,
        residuated: residual.is_some(),
        residual,
        anti_residuated: anti_residual.is_some(),
        anti_residual,
        order_isomorphism: p_bijective && order_embedding,
    })
}

/// One of the six small examples separating the map classes, with the
/// flags its description asserts.
#[derive(Debug, Clone)]
pub struct SeparatingCase {
    pub id: char,
    pub p: FinitePreorder,
    pub q: FinitePreorder,
    pub map: Vec<usize>,
    pub stated: Vec<(&'static str, bool)>,
}

fn named(labels: &[&str], pairs: &[(usize, usize)]) -> FinitePreorder {
    FinitePreorder::from_pairs(labels.iter().map(|s| s.to_string()).collect(), pairs).unwrap()
}

pub fn separating_cases() -> Vec<SeparatingCase> {
    use SeparatingCase as C;
    let chain2 = || named(&["y0", "y1"], &[(0, 1)]);
    vec![
        C {
            id: 'a',
            p: named(&["x0", "x1"], &[(0, 1)]),
            q: chain2(),
            map: vec![0, 0],
            stated: vec![("residuated", true), ("order_preserving", true), ("p_surjective", false), ("p_injective", false)],
        },
        C {
            id: 'b',
            p: named(&["x"], &[]),
            q: chain2(),
            map: vec![1],
            stated: vec![("order_embedding", true), ("p_injective", true), ("residuated", false), ("p_surjective", false)],
        },
        C {
            id: 'c',
            p: named(&["x0", "x1"], &[(0, 1)]),
            q: named(&["y"], &[]),
            map: vec![0, 0],
            stated: vec![("residuated", true), ("p_surjective", true), ("order_preserving", true), ("p_injective", false)],
        },
        C {
            id: 'd',
            p: named(&["x"], &[]),
            q: chain2(),
            map: vec![0],
            stated: vec![("residuated", true), ("p_injective", true), ("order_preserving", true), ("p_surjective", false)],
        },
        C {
            // a V shape onto a 3-chain
            id: 'e',
            p: named(&["p", "q", "r"], &[(1, 0), (1, 2)]),
            q: named(&["y0", "y1", "y2"], &[(0, 1), (1, 2)]),
            map: vec![2, 0, 1],
            stated: vec![("order_preserving", true), ("p_bijective", true), ("order_reflecting", false), ("residuated", false)],
        },
        C {
            // a 3-chain onto a V shape
            id: 'f',
            p: named(&["x0", "x1", "x2"], &[(0, 1), (1, 2)]),
            q: named(&["t0", "t1", "t2"], &[(0, 1), (0, 2)]),
            map: vec![0, 1, 2],
            stated: vec![("order_reflecting", true), ("p_bijective", true), ("order_preserving", false)],
        },
    ]
}

impl MapClassification {
    pub fn flag(&self, name: &str) -> Option<bool> {
        Some(match name {
            "order_preserving" => self.order_preserving,
            "order_reflecting" => self.order_reflecting,
            "order_embedding" => self.order_embedding,
            "p_preserving" => self.p_preserving,
            "p_injective" => self.p_injective,
            "p_surjective" => self.p_surjective,
            "p_bijective" => self.p_bijective,
            "residuated" => self.residuated,
            "anti_residuated" => self.anti_residuated,
            "order_isomorphism" => self.order_isomorphism,
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| all_preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
    }

    #[test]
    fn rejects_non_preorders() {
        let l = numbered(2);
        assert!(FinitePreorder::new(l.clone(), vec![vec![false, false], vec![false, true]]).is_err());
        let l3 = numbered(3);
        let le = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert!(FinitePreorder::new(l3, le).is_err());
        assert!(FinitePreorder::new(l, vec![vec![true]]).is_err());
    }

    #[test]
    fn parse_text_format() {
        let p = FinitePreorder::parse("elements a b c  # three\na <= b, b <= c\n").unwrap();
        assert!(p.le(0, 2) && !p.le(2, 0));
        assert_eq!(FinitePreorder::parse(&p.to_string()).unwrap(), p);
        assert!(FinitePreorder::parse("a <= b").is_err());
        assert!(FinitePreorder::parse("elements a\na <= z").is_err());
    }

    #[test]
    fn down_set_basics() {
        let c = FinitePreorder::chain(4);
        assert!(c.is_down_set(&[]));
        assert_eq!(c.principal(3), vec![0, 1, 2, 3]);
        assert_eq!(down_sets(&c, &DownSetQuery::IsPrincipal(vec![0, 1])), DownSetAnswer::Generator(Some(1)));
        assert_eq!(c.enumerate_down_sets().len(), 5);
    }

    #[test]
    fn identity_has_every_flag() {
        for p in all_preorders(3) {
            let id: Vec<usize> = (0..3).collect();
            let m = classify_map(&p, &p, &id).unwrap();
            assert!(m.order_embedding && m.p_bijective && m.residuated && m.anti_residuated && m.order_isomorphism);
            assert_eq!(m.residual.unwrap().iter().map(|&r| p.equiv(r, id[r])).all(|b| b), true);
        }
    }

    #[test]
    fn small_residuals() {
        let c3 = FinitePreorder::chain(3);
        assert!(classify_map(&c3, &c3, &[0, 0, 0]).unwrap().residuated);
        let c2 = FinitePreorder::chain(2);
        // bottom-constant has the top-constant as residual; top-constant has none
        assert_eq!(residual_of(&c2, &c2, &[0, 0]), Some(vec![1, 1]));
        assert_eq!(residual_of(&c2, &c2, &[1, 1]), None);
        assert_eq!(residual_of(&c2, &c2, &[1, 0]), None);
    }

    #[test]
    fn separating_cases_match_their_descriptions() {
        for case in separating_cases() {
            let m = classify_map(&case.p, &case.q, &case.map).unwrap();
            for (flag, want) in &case.stated {
                assert_eq!(m.flag(flag), Some(*want), "case {} flag {flag}", case.id);
            }
        }
    }
}
