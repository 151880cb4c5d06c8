//! Sparse multivariate polynomials with Gaussian-rational coefficients.
//!
//! Terms are kept in graded-lex order with zero coefficients removed, so two
//! polynomials are equal exactly when their term maps are equal.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::scalar::{parse_rat, Gauss};
use super::ExactError;

/// Exponent vector; ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Gauss>,
}

impl MultiPoly {
    pub fn zero(vars: Arc<[String]>) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Arc<[String]>, c: Gauss) -> Self {
        let n = vars.len();
        let mut p = MultiPoly::zero(vars);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn var(vars: Arc<[String]>, i: usize) -> Self {
        let n = vars.len();
        assert!(i < n, "variable index out of range");
        let mut e = vec![0; n];
        e[i] = 1;
        let mut p = MultiPoly::zero(vars);
        p.add_term(Monomial(e), Gauss::one());
        p
    }

    /// `sum_i c_i x_i` for a coefficient vector over all variables.
    pub fn linear(vars: Arc<[String]>, coeffs: &[Gauss]) -> Self {
        let mut p = MultiPoly::zero(vars.clone());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; vars.len()];
                e[i] = 1;
                p.add_term(Monomial(e), c.clone());
            }
        }
        p
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Gauss {
        self.terms.get(m).cloned().unwrap_or_else(Gauss::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Gauss) {
        debug_assert_eq!(m.0.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), ExactError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(ExactError::VariableMismatch(self.vars.to_vec(), other.vars.to_vec()))
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, ExactError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, ExactError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, ExactError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Gauss) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), c * v)).collect() }
    }

    fn neg_ref(&self) -> MultiPoly {
        self.scale(&Gauss::from_int(-1))
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.vars.clone(), Gauss::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[i];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[i] -= 1;
            out.add_term(Monomial(e), c * &Gauss::from_int(i64::from(k)));
        }
        out
    }

    pub fn eval(&self, point: &[Gauss]) -> Gauss {
        assert_eq!(point.len(), self.vars.len(), "point dimension");
        let mut s = Gauss::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                for _ in 0..k {
                    t = &t * x;
                }
            }
            s += &t;
        }
        s
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (x, &k) in point.iter().zip(&m.0) {
                t *= x.powu(k);
            }
            s += t;
        }
        s
    }

    /// Replaces each variable by a polynomial (all over a common variable list).
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, ExactError> {
        if images.len() != self.vars.len() {
            return Err(ExactError::DimensionMismatch("substitution arity".into()));
        }
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| self.vars.clone());
        let mut out = MultiPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target.clone(), c.clone());
            for (img, &k) in images.iter().zip(&m.0) {
                for _ in 0..k {
                    t = t.try_mul(img)?;
                }
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    pub fn conj_coefficients(&self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect() }
    }

    /// Parses an arithmetic expression in the given variables: sums, products,
    /// quotients by constants, integer powers, parentheses and the unit `i`.
    pub fn parse(src: &str, vars: Arc<[String]>) -> Result<MultiPoly, ExactError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, vars };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(ExactError::Parse(format!("trailing input in {src:?}")));
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = format_monomial(m, &self.vars);
            let body = if mono.is_empty() {
                c.to_string()
            } else if *c == Gauss::one() {
                mono
            } else if *c == Gauss::from_int(-1) {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            if k == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn format_monomial(m: &Monomial, vars: &[String]) -> String {
    let parts: Vec<String> =
        m.0.iter()
            .zip(vars)
            .filter(|(k, _)| **k > 0)
            .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
            .collect();
    parts.join("*")
}

macro_rules! poly_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            /// Panics if the variable lists differ; use the `try_` form otherwise.
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                self.$f(rhs).expect("polynomials over different variables")
            }
        }
    };
}

poly_op!(Add, add, try_add);
poly_op!(Sub, sub, try_sub);
poly_op!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, ExactError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ExactError::Parse(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
    vars: Arc<[String]>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<MultiPoly, ExactError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if op == '+' { acc.try_add(&t)? } else { acc.try_sub(&t)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, ExactError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    acc = acc.try_mul(&f)?;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    let d = constant_value(&f).ok_or_else(|| ExactError::Parse("division by a non-constant".into()))?;
                    acc = acc.scale(&d.inv()?);
                }
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('(')) => {
                    let f = self.power()?;
                    acc = acc.try_mul(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, ExactError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ExactError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| ExactError::Parse(format!("bad exponent {n:?}")))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(ExactError::Parse("exponent must be a non-negative integer".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, ExactError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| ExactError::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(MultiPoly::constant(self.vars.clone(), Gauss::real(parse_rat(&n)?))),
            Tok::Ident(name) => {
                if let Some(k) = self.vars.iter().position(|v| *v == name) {
                    Ok(MultiPoly::var(self.vars.clone(), k))
                } else if name == "i" {
                    Ok(MultiPoly::constant(self.vars.clone(), Gauss::i()))
                } else {
                    Err(ExactError::Parse(format!("unknown variable {name:?}")))
                }
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                match self.tokens.get(self.pos) {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(ExactError::Parse("missing ')'".into())),
                }
            }
            Tok::Op(c) => Err(ExactError::Parse(format!("unexpected {c:?}"))),
        }
    }
}

fn constant_value(p: &MultiPoly) -> Option<Gauss> {
    match p.degree() {
        None => Some(Gauss::zero()),
        Some(0) => Some(p.coefficient(&Monomial::one(p.nvars()))),
        _ => None,
    }
}

/// Convenience for building a shared variable list.
pub fn var_list<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}
