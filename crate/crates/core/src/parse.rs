//! Text grammar for expressions, predicates and domains.
//!
//! In one dimension `n` names `x1`. In two dimensions the single-letter
//! names are assigned alphabetically, so `m` is `x1` and `n` is `x2`.

use crate::domain::{Base, DomainSpec};
use crate::error::{Error, Point, Result};
use crate::expr::{CmpOp, FuncExpr, Predicate};
use crate::num::Q;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Slot(usize),
    Sym(&'static str),
}

const SYMS: [&str; 17] = ["<=", ">=", "==", "!=", "<", ">", "=", "+", "-", "*", "(", ")", ",", ";", "[", "]", "^"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| Error::Parse { line: 1, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // p/q is a single literal; there is no division operator
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let q: Q = s.parse().map_err(|_| err(col, format!("bad number {s:?}")))?;
            out.push((Tok::Num(q), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '+') {
                // '+' only continues the base name N+
                if chars[i] == '+' && !(i == start + 1 && chars[start] == 'N') {
                    break;
                }
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if c == '$' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let k = s.parse().map_err(|_| err(col, "expected slot number after '$'".into()))?;
            out.push((Tok::Slot(k), col));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push((Tok::Sym(s), col));
                    i += s.len();
                }
                None => return Err(err(col, format!("unexpected character {c:?}"))),
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    dims: Vec<usize>,
}

impl Parser {
    fn new(text: &str, dim: usize) -> Result<Parser> {
        Ok(Parser { toks: lex(text)?, pos: 0, end_col: text.chars().count() + 1, dims: vec![dim] })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, col: self.col(), msg: msg.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(format!("expected '{s}'"))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.fail("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    fn signed_rational(&mut self) -> Result<Q> {
        let neg = self.eat_sym("-");
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(if neg { -q } else { q })
            }
            _ => self.fail("expected a rational literal"),
        }
    }

    fn expr(&mut self) -> Result<FuncExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat_sym("+") {
                acc = FuncExpr::add(acc, self.term()?);
            } else if self.eat_sym("-") {
                acc = FuncExpr::sub(acc, self.term()?);
            } else if self.is_ident("max") {
                self.pos += 1;
                acc = FuncExpr::max(acc, self.term()?);
            } else if self.is_ident("min") {
                self.pos += 1;
                acc = FuncExpr::min(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FuncExpr> {
        let mut factors = vec![self.factor()?];
        while self.eat_sym("*") {
            factors.push(self.factor()?);
        }
        Ok(build_term(factors))
    }

    /// Returns the factor and whether it was a bare literal.
    fn factor(&mut self) -> Result<(FuncExpr, bool)> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok((FuncExpr::Const(q), true))
            }
            Some(Tok::Sym("-")) => {
                self.pos += 1;
                if let Some(Tok::Num(q)) = self.peek().cloned() {
                    self.pos += 1;
                    return Ok((FuncExpr::Const(-q), true));
                }
                let (f, _) = self.factor()?;
                Ok((FuncExpr::scale(Q::int(-1), f), false))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok((e, false))
            }
            Some(Tok::Slot(k)) => {
                self.pos += 1;
                Ok((FuncExpr::Slot(k), false))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.is_sym("(") {
                    self.pos += 1;
                    let e = self.call(&name)?;
                    self.expect(")")?;
                    Ok((e, false))
                } else {
                    self.pos -= 1;
                    let v = self.var(&name)?;
                    self.pos += 1;
                    Ok((v, false))
                }
            }
            _ => self.fail("expected an expression"),
        }
    }

    fn var(&self, name: &str) -> Result<FuncExpr> {
        let d = self.dim();
        let idx = match name {
            "i" => return Ok(FuncExpr::Index),
            "n" if d == 1 => Some(1),
            "n" if d == 2 => Some(2),
            "m" if d == 2 => Some(1),
            _ => name
                .strip_prefix('x')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| (1..=d).contains(k)),
        };
        match idx {
            Some(k) => Ok(FuncExpr::Coord(k)),
            None => self.fail(format!("unknown variable {name:?} in dimension {d}")),
        }
    }

    fn call(&mut self, name: &str) -> Result<FuncExpr> {
        Ok(match name {
            "pow" => {
                let e = self.expr()?;
                self.expect(",")?;
                FuncExpr::pow(e, self.signed_rational()?)
            }
            "log" | "exp" => {
                let b = self.signed_rational()?;
                self.expect(",")?;
                let e = self.expr()?;
                if name == "log" {
                    if b <= Q::one() {
                        return self.fail("log base must exceed 1");
                    }
                    FuncExpr::Log(b, Box::new(e))
                } else {
                    if !b.is_positive() {
                        return self.fail("exp base must be positive");
                    }
                    FuncExpr::Exp(b, Box::new(e))
                }
            }
            "floor" => FuncExpr::floor(self.expr()?),
            "ceil" => FuncExpr::ceil(self.expr()?),
            "sgn" => FuncExpr::sgn(self.expr()?),
            "ind" => FuncExpr::ind(self.pred()?),
            "if" => {
                let p = self.pred()?;
                self.expect(",")?;
                let a = self.expr()?;
                self.expect(",")?;
                FuncExpr::ite(p, a, self.expr()?)
            }
            "max" | "min" => {
                let a = self.expr()?;
                self.expect(",")?;
                let b = self.expr()?;
                if name == "max" {
                    FuncExpr::max(a, b)
                } else {
                    FuncExpr::min(a, b)
                }
            }
            "subsetsum" => {
                let count = self.expr()?;
                self.expect(";")?;
                let weight = self.expr()?;
                self.expect(";")?;
                self.expect("[")?;
                let mut map = vec![self.expr()?];
                while self.eat_sym(",") {
                    map.push(self.expr()?);
                }
                self.expect("]")?;
                self.expect(";")?;
                self.dims.push(map.len());
                let body = self.expr();
                self.dims.pop();
                FuncExpr::SubsetSum {
                    count: Box::new(count),
                    weight: Box::new(weight),
                    map,
                    body: Box::new(body?),
                }
            }
            _ => return self.fail(format!("unknown function {name:?}")),
        })
    }

    fn pred(&mut self) -> Result<Predicate> {
        let mut acc = self.conj()?;
        while self.is_ident("or") {
            self.pos += 1;
            acc = Predicate::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Predicate> {
        let mut acc = self.patom()?;
        while self.is_ident("and") {
            self.pos += 1;
            acc = Predicate::and(acc, self.patom()?);
        }
        Ok(acc)
    }

    fn patom(&mut self) -> Result<Predicate> {
        if self.is_ident("not") {
            self.pos += 1;
            return Ok(Predicate::not(self.patom()?));
        }
        if self.is_sym("(") {
            let save = self.pos;
            self.pos += 1;
            if let Ok(p) = self.pred() {
                if self.eat_sym(")") && !self.continues_expr() {
                    return Ok(p);
                }
            }
            self.pos = save;
        }
        let a = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Sym(s)) => match *s {
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                ">=" => CmpOp::Ge,
                "=" | "==" => CmpOp::Eq,
                "!=" => CmpOp::Ne,
                _ => return self.fail("expected a comparison"),
            },
            _ => return self.fail("expected a comparison"),
        };
        self.pos += 1;
        Ok(Predicate::cmp(a, op, self.expr()?))
    }

    fn continues_expr(&self) -> bool {
        match self.peek() {
            Some(Tok::Sym(s)) => matches!(*s, "+" | "-" | "*" | "<" | "<=" | ">" | ">=" | "=" | "==" | "!="),
            Some(Tok::Ident(s)) => s == "max" || s == "min",
            _ => false,
        }
    }
}

fn build_term(mut factors: Vec<(FuncExpr, bool)>) -> FuncExpr {
    if factors.len() > 1 && factors[0].1 {
        let (lit, _) = factors.remove(0);
        let FuncExpr::Const(q) = lit else { unreachable!() };
        return FuncExpr::scale(q, build_term(factors));
    }
    let mut it = factors.into_iter().map(|f| f.0);
    let first = it.next().expect("term has a factor");
    it.fold(first, FuncExpr::mul)
}

/// Parse an expression over `dim` coordinates.
pub fn parse_expr(text: &str, dim: usize) -> Result<FuncExpr> {
    let mut p = Parser::new(text, dim)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_predicate(text: &str, dim: usize) -> Result<Predicate> {
    let mut p = Parser::new(text, dim)?;
    let e = p.pred()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_rational(text: &str) -> Result<Q> {
    text.trim()
        .parse()
        .map_err(|e: crate::num::ParseQError| Error::Parse { line: 1, col: 1, msg: e.0 })
}

/// Parse `N^d`, `N+^d`, `Z^d` or `finite:[...]`, optionally followed by
/// `where <predicate>`.
pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let (head, cond) = match find_word(text, "where") {
        Some(at) => (&text[..at], Some((&text[at + 5..], at + 5))),
        None => (text, None),
    };
    let head_t = head.trim();
    let spec = if let Some(rest) = head_t.strip_prefix("finite:") {
        parse_finite(rest.trim())?
    } else {
        let (base_s, dim_s) = match head_t.split_once('^') {
            Some((b, d)) => (b.trim(), Some(d.trim())),
            None => (head_t, None),
        };
        let base = match base_s {
            "N" => Base::Naturals,
            "N+" => Base::PositiveNaturals,
            "Z" => Base::Integers,
            _ => return Err(Error::Parse { line: 1, col: 1, msg: format!("unknown domain {head_t:?}") }),
        };
        let dim = match dim_s {
            Some(d) => d
                .parse::<usize>()
                .ok()
                .filter(|d| *d >= 1)
                .ok_or_else(|| Error::Parse { line: 1, col: 1, msg: format!("bad dimension {d:?}") })?,
            None => 1,
        };
        DomainSpec::grid(dim, base)
    };
    match cond {
        None => Ok(spec),
        Some((c, offset)) => {
            let pred = parse_predicate(c, spec.dim()).map_err(|e| match e {
                Error::Parse { line, col, msg } => Error::Parse { line, col: col + offset, msg },
                other => other,
            })?;
            spec.with_constraint(pred)
        }
    }
}

fn find_word(text: &str, word: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut start = 0;
    while let Some(off) = text[start..].find(word) {
        let at = start + off;
        let before = at == 0 || !bytes[at - 1].is_ascii_alphanumeric();
        let after = at + word.len() >= bytes.len() || !bytes[at + word.len()].is_ascii_alphanumeric();
        if before && after {
            return Some(at);
        }
        start = at + word.len();
    }
    None
}

fn parse_finite(text: &str) -> Result<DomainSpec> {
    let perr = |msg: &str| Error::Parse { line: 1, col: 1, msg: msg.to_string() };
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| perr("finite domain must be a bracketed list"))?
        .trim();
    if inner.is_empty() {
        return DomainSpec::finite_with_dim(1, Vec::new());
    }
    let mut points: Vec<Point> = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        rest = rest.trim_start_matches([',', ' ']);
        if rest.is_empty() {
            break;
        }
        if let Some(r) = rest.strip_prefix('(') {
            let close = r.find(')').ok_or_else(|| perr("unclosed tuple"))?;
            let p = r[..close]
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| perr("bad tuple coordinate")))
                .collect::<Result<Point>>()?;
            points.push(p);
            rest = &r[close + 1..];
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            let v = rest[..end].trim().parse::<i64>().map_err(|_| perr("bad point"))?;
            points.push(vec![v]);
            rest = &rest[end..];
        }
    }
    DomainSpec::finite(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_follow_alphabetical_order() {
        assert_eq!(parse_expr("n", 1).unwrap(), FuncExpr::Coord(1));
        assert_eq!(parse_expr("m", 2).unwrap(), FuncExpr::Coord(1));
        assert_eq!(parse_expr("n", 2).unwrap(), FuncExpr::Coord(2));
        assert!(parse_expr("m", 1).is_err());
    }

    #[test]
    fn leading_literal_scales() {
        let e = parse_expr("3*n + 1", 1).unwrap();
        assert_eq!(
            e,
            FuncExpr::add(FuncExpr::scale(Q::int(3), FuncExpr::Coord(1)), FuncExpr::int(1))
        );
        assert_eq!(parse_expr("pow(n, -1)", 1).unwrap(), FuncExpr::pow(FuncExpr::Coord(1), Q::int(-1)));
    }

    #[test]
    fn parenthesised_predicates_backtrack() {
        let p = parse_predicate("(n + 1) > 3 and (n < 10 or n = 12)", 1).unwrap();
        assert!(p.holds_at(&[12]).unwrap());
        assert!(!p.holds_at(&[2]).unwrap());
    }

    #[test]
    fn domains() {
        let d = parse_domain("N^2 where m >= 1").unwrap();
        assert_eq!(d.dim(), 2);
        assert!(!d.contains(&[0, 4]).unwrap());
        let f = parse_domain("finite:[(1,2),(0,5)]").unwrap();
        assert_eq!(f.finite_points().unwrap(), &[vec![0, 5], vec![1, 2]]);
        assert_eq!(parse_domain("finite:[3,1,2]").unwrap(), DomainSpec::range(1, 3));
        assert_eq!(parse_domain("N+").unwrap(), DomainSpec::grid(1, Base::PositiveNaturals));
    }

    #[test]
    fn error_has_column() {
        match parse_expr("n + * 2", 1) {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("{other:?}"),
        }
    }
}
