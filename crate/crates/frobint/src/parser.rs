//! Recursive-descent parser for polynomial expressions over F_{p^k}.
//!
//! Grammar:
//!   expr   := term (('+'|'-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' nat)?
//!   atom   := var | nat | 'g' ('^' nat)? | '(' expr ')'
//! Whitespace-insensitive, left-associative, no juxtaposition. `g` is the
//! fixed generator of the coefficient field.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ffield::{FieldCtx, Fq, UniPoly};
use crate::pseries::{TruncSeries2, EXACT};

pub const MAX_EXPONENT: u64 = 1 << 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {0}: {1}")]
    Syntax(usize, String),
    #[error("unknown variable '{0}' at position {1}")]
    UnknownVariable(String, usize),
    #[error("exponent at position {0} exceeds 2^31")]
    ExponentTooLarge(usize),
    #[error("expression uses {got} variables where {want} expected")]
    VariableArityMismatch { want: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u64),
    Var(usize),
    Scalar(u64),
    Gen(u64),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: u64,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut val: u64 = 0;
        while let Some(&c) = self.src.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            val = val
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as u64))
                .filter(|&v| v <= MAX_EXPONENT)
                .ok_or(ParseError::ExponentTooLarge(start))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::Syntax(start, "expected a number".into()));
        }
        Ok(val)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                b'-' => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.nat()?;
            return Ok(Expr::Pow(Box::new(atom), e));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(c) = self.peek() else {
            return Err(ParseError::Syntax(self.pos, "unexpected end".into()));
        };
        let start = self.pos;
        match c {
            b'(' => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::Syntax(self.pos, "expected ')'".into()));
                }
                self.bump();
                Ok(e)
            }
            b'0'..=b'9' => Ok(Expr::Scalar(self.nat()? % self.p)),
            c if c.is_ascii_alphabetic() => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                if name == "g" {
                    if self.peek() == Some(b'^') {
                        self.bump();
                        let e = self.nat()?;
                        return Ok(Expr::Gen(e));
                    }
                    return Ok(Expr::Gen(1));
                }
                match self.vars.iter().position(|&v| v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ParseError::UnknownVariable(name.to_string(), start)),
                }
            }
            _ => Err(ParseError::Syntax(start, format!("unexpected '{}'", c as char))),
        }
    }
}

/// Parse `src` over the declared variable set.
pub fn parse_expr(src: &str, ctx: &FieldCtx, vars: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, p: ctx.p(), vars };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::Syntax(p.pos, "trailing input".into()));
    }
    Ok(e)
}

/// Sparse multivariate polynomial keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u64>, Fq>,
}

impl MPoly {
    fn zero(nvars: usize) -> MPoly {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    fn constant(nvars: usize, c: Fq) -> MPoly {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(vec![0; nvars], c);
        }
        MPoly { nvars, terms: t }
    }

    fn add_term(&mut self, ctx: &FieldCtx, key: Vec<u64>, c: Fq) {
        let e = self.terms.entry(key.clone()).or_default();
        *e = ctx.add(*e, c);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn add(&self, ctx: &FieldCtx, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_term(ctx, k.clone(), c);
        }
        out
    }

    fn neg(&self, ctx: &FieldCtx) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, &c)| (k.clone(), ctx.neg(c))).collect(),
        }
    }

    fn mul(&self, ctx: &FieldCtx, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (k1, &c1) in &self.terms {
            for (k2, &c2) in &rhs.terms {
                let key: Vec<u64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_term(ctx, key, ctx.mul(c1, c2));
            }
        }
        out
    }

    fn pow(&self, ctx: &FieldCtx, mut e: u64) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::constant(self.nvars, ctx.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ctx, &base);
            }
        }
        acc
    }
}

/// Expand an AST into a sparse polynomial over the declared variables.
pub fn lower(ctx: &FieldCtx, e: &Expr, nvars: usize) -> MPoly {
    match e {
        Expr::Add(a, b) => lower(ctx, a, nvars).add(ctx, &lower(ctx, b, nvars)),
        Expr::Sub(a, b) => lower(ctx, a, nvars).add(ctx, &lower(ctx, b, nvars).neg(ctx)),
        Expr::Mul(a, b) => lower(ctx, a, nvars).mul(ctx, &lower(ctx, b, nvars)),
        Expr::Pow(a, e) => lower(ctx, a, nvars).pow(ctx, *e),
        Expr::Var(i) => {
            let mut key = vec![0u64; nvars];
            key[*i] = 1;
            let mut t = BTreeMap::new();
            t.insert(key, ctx.one());
            MPoly { nvars, terms: t }
        }
        Expr::Scalar(c) => MPoly::constant(nvars, ctx.from_u64(*c)),
        Expr::Gen(e) => MPoly::constant(nvars, ctx.pow(ctx.generator(), *e as u128)),
    }
}

/// Parse a bivariate polynomial (curve or germ) over the two given variables.
pub fn parse_series2(
    src: &str,
    ctx: &FieldCtx,
    vars: [&str; 2],
) -> Result<TruncSeries2, ParseError> {
    let e = parse_expr(src, ctx, &vars)?;
    let m = lower(ctx, &e, 2);
    Ok(TruncSeries2::from_terms(
        m.terms.into_iter().map(|(k, c)| ((k[0], k[1]), c)),
        EXACT,
    ))
}

/// Parse a univariate polynomial in the given variable.
pub fn parse_unipoly(src: &str, ctx: &FieldCtx, var: &str) -> Result<UniPoly, ParseError> {
    let e = parse_expr(src, ctx, &[var])?;
    let m = lower(ctx, &e, 1);
    let mut coeffs = Vec::new();
    for (k, c) in m.terms {
        let d = k[0] as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, Fq::default());
        }
        coeffs[d] = c;
    }
    Ok(UniPoly::from_coeffs(coeffs))
}

/// Canonical pretty-printer (monomials in ascending order).
pub fn pretty(ctx: &FieldCtx, m: &MPoly, vars: &[&str]) -> String {
    if m.terms.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (k, &c) in &m.terms {
        let mut factors: Vec<String> = Vec::new();
        let cs = ctx.fmt_elem(c);
        let is_const = k.iter().all(|&e| e == 0);
        if cs != "1" || is_const {
            factors.push(cs);
        }
        for (i, &e) in k.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(vars[i].to_string()),
                _ => factors.push(format!("{}^{}", vars[i], e)),
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn parse_examples() {
        let ctx = make_field(5, 1).unwrap();
        let f = parse_series2("t1^2*t2 + 3*t1 + 1", &ctx, ["t1", "t2"]).unwrap();
        assert_eq!(f.coeff(2, 1), ctx.one());
        assert_eq!(f.coeff(1, 0), ctx.from_u64(3));
        assert_eq!(f.coeff(0, 0), ctx.one());

        let c = parse_series2("x1 - x2", &ctx, ["x1", "x2"]).unwrap();
        assert_eq!(c.max_degree(crate::pseries::Axis::T1), 1);
        assert_eq!(c.max_degree(crate::pseries::Axis::T2), 1);

        assert!(matches!(
            parse_series2("t1 t2", &ctx, ["t1", "t2"]),
            Err(ParseError::Syntax(..))
        ));
        assert!(matches!(
            parse_series2("t1 + x9", &ctx, ["t1", "t2"]),
            Err(ParseError::UnknownVariable(..))
        ));
        assert!(matches!(
            parse_series2("t1^9999999999", &ctx, ["t1", "t2"]),
            Err(ParseError::ExponentTooLarge(_))
        ));
    }

    #[test]
    fn lower_examples() {
        let ctx2 = make_field(2, 1).unwrap();
        let f = parse_series2("(t1+t2)^2", &ctx2, ["t1", "t2"]).unwrap();
        assert_eq!(f.coeff(2, 0), ctx2.one());
        assert_eq!(f.coeff(0, 2), ctx2.one());
        assert!(f.coeff(1, 1).is_zero());

        let ctx4 = make_field(2, 2).unwrap();
        let g = parse_series2("g*x1 + 1", &ctx4, ["x1", "x2"]).unwrap();
        assert_eq!(g.coeff(1, 0), ctx4.generator());

        let ctx5 = make_field(5, 1).unwrap();
        let u = parse_unipoly("u^3 - u", &ctx5, "u").unwrap();
        assert_eq!(u.valuation(), Some(1));
        assert_eq!(u.degree(), Some(3));
    }

    #[test]
    fn scalars_reduced_mod_p() {
        let ctx = make_field(5, 1).unwrap();
        let a = parse_series2("7*t1", &ctx, ["t1", "t2"]).unwrap();
        let b = parse_series2("2*t1", &ctx, ["t1", "t2"]).unwrap();
        assert_eq!(a, b);
        // 5*t1 vanishes entirely
        let z = parse_series2("5*t1", &ctx, ["t1", "t2"]).unwrap();
        assert!(z.is_stored_zero());
    }

    #[test]
    fn round_trip() {
        let ctx = make_field(7, 1).unwrap();
        for src in ["t1^2*t2 + 3*t1 + 1", "t2^3 + 5*t1*t2 + 2", "t1 + t2", "6*t1^4"] {
            let e = parse_expr(src, &ctx, &["t1", "t2"]).unwrap();
            let m = lower(&ctx, &e, 2);
            let printed = pretty(&ctx, &m, &["t1", "t2"]);
            let e2 = parse_expr(&printed, &ctx, &["t1", "t2"]).unwrap();
            assert_eq!(m, lower(&ctx, &e2, 2), "round trip failed for {src} -> {printed}");
        }
    }

    #[test]
    fn additivity_of_parse() {
        let ctx = make_field(5, 1).unwrap();
        let a = parse_expr("t1^2 + 3", &ctx, &["t1", "t2"]).unwrap();
        let b = parse_expr("t2*t1", &ctx, &["t1", "t2"]).unwrap();
        let sum = parse_expr("t1^2 + 3 + t2*t1", &ctx, &["t1", "t2"]).unwrap();
        let lhs = lower(&ctx, &sum, 2);
        let rhs = lower(&ctx, &a, 2).add(&ctx, &lower(&ctx, &b, 2));
        assert_eq!(lhs, rhs);
    }
}
