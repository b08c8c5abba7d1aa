//! Exact multivariate polynomials and the Jacobian n-bracket.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::{parse_rational, Rational};

/// Polynomial over an ordered list of variables; terms map exponent vectors
/// to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Self {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    /// The `i`-th variable (0-based).
    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        Parser::new(text, vars).parse()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.vars.len(), "exponent length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative in the `i`-th variable.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(&self.vars, Rational::one()), |acc, _| {
            &acc * self
        })
    }

    fn same_vars(&self, other: &Self) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials over different variables"
        );
    }

    /// Random polynomial with up to `max_terms` terms of total degree at
    /// most `max_degree` and small integer coefficients.
    pub fn random<R: Rng + ?Sized>(
        vars: &[String],
        max_degree: u32,
        max_terms: usize,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zero(vars);
        let terms = rng.random_range(1..=max_terms.max(1));
        for _ in 0..terms {
            let mut budget = rng.random_range(0..=max_degree);
            let mut e = vec![0; vars.len()];
            while budget > 0 {
                e[rng.random_range(0..vars.len())] += 1;
                budget -= 1;
            }
            let c = loop {
                let c: i64 = rng.random_range(-3..=3);
                if c != 0 {
                    break c;
                }
            };
            p.add_term(e, Rational::from_integer(c.into()));
        }
        p
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.same_vars(rhs);
        let mut out = Polynomial::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Polynomial {
    /// Highest total degree first, e.g. `2*x*y^2 - 1/3*z + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut order: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        order.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.0.iter().sum(), b.0.iter().sum());
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in order.into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        self.vars[v].clone()
                    } else {
                        format!("{}^{k}", self.vars[v])
                    }
                })
                .collect();
            if monomial.is_empty() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                f.write_str(&monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for `+ - * ^`, parentheses, identifiers and
/// integer or `p/q` literals.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: &'a [String]) -> Self {
        Self { src, pos: 0, vars }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..]
            .chars()
            .next()
            .filter(|c| c.is_whitespace())
        {
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn parse(mut self) -> Result<Polynomial> {
        if self.peek().is_none() {
            return Err(self.error("empty expression"));
        }
        let p = self.expr()?;
        match self.peek() {
            None => Ok(p),
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        let k: u32 = digits
            .parse()
            .map_err(|_| self.error("expected a non-negative integer exponent"))?;
        Ok(base.pow(k))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.src[self.pos..].starts_with(&pred) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.take_while(|c| c.is_ascii_digit());
                if self.src[self.pos..].starts_with('/') {
                    self.pos += 1;
                    if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                        return Err(self.error("expected a denominator"));
                    }
                }
                let value =
                    parse_rational(&self.src[start..self.pos]).map_err(|e| Error::Parse {
                        position: start,
                        message: e.to_string(),
                    })?;
                Ok(Polynomial::constant(self.vars, value))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Polynomial::var(self.vars, i)),
                    None => Err(Error::Parse {
                        position: start,
                        message: format!("unknown variable {name:?}"),
                    }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Variable names `x1..xn`.
pub fn default_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn check_vars(polys: &[&Polynomial], vars: &[String]) -> Result<()> {
    for p in polys {
        if p.vars != vars {
            return Err(Error::Invalid(format!(
                "polynomial over {:?}, expected variables {:?}",
                p.vars, vars
            )));
        }
    }
    Ok(())
}

/// `det(d f_i / d x_j)`, by cofactor expansion over column subsets.
pub fn jacobian_bracket(fs: &[Polynomial], vars: &[String]) -> Result<Polynomial> {
    let n = vars.len();
    if fs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: fs.len(),
        });
    }
    if n == 0 || n > 16 {
        return Err(Error::Invalid(format!(
            "unsupported number of variables {n}"
        )));
    }
    check_vars(&fs.iter().collect::<Vec<_>>(), vars)?;
    let jac: Vec<Vec<Polynomial>> = fs
        .iter()
        .map(|f| (0..n).map(|j| f.derivative(j)).collect())
        .collect();
    Ok(determinant(&jac, vars))
}

fn determinant(m: &[Vec<Polynomial>], vars: &[String]) -> Polynomial {
    let n = m.len();
    // minors[mask]: determinant of rows 0..|mask| on the columns in `mask`.
    let mut minors: HashMap<u32, Polynomial> = HashMap::new();
    minors.insert(0, Polynomial::constant(vars, Rational::one()));
    for row in m {
        let mut next = HashMap::new();
        for (mask, minor) in &minors {
            if minor.is_zero() {
                continue;
            }
            for (c, entry) in row.iter().enumerate() {
                if mask >> c & 1 == 1 || entry.is_zero() {
                    continue;
                }
                // Sign of placing column c last among mask + {c}.
                let after = (mask >> c).count_ones();
                let term = entry * minor;
                let entry = next
                    .entry(mask | 1 << c)
                    .or_insert_with(|| Polynomial::zero(vars));
                *entry = if after % 2 == 1 {
                    &*entry - &term
                } else {
                    &*entry + &term
                };
            }
        }
        minors = next;
    }
    minors
        .remove(&((1u32 << n) - 1))
        .unwrap_or_else(|| Polynomial::zero(vars))
}

fn common_vars(polys: &[&Polynomial]) -> Result<Vec<String>> {
    let vars = polys
        .first()
        .map(|p| p.vars.clone())
        .ok_or_else(|| Error::Invalid("no polynomials given".into()))?;
    check_vars(polys, &vars)?;
    Ok(vars)
}

fn bracket_with(fs: &[Polynomial], last: Polynomial, vars: &[String]) -> Result<Polynomial> {
    let mut args = fs.to_vec();
    args.push(last);
    jacobian_bracket(&args, vars)
}

/// `{f, {g_1..g_n}} - sum_i {g_1 .. {f, g_i} .. g_n}` with `f = (f_1..f_{n-1})`.
pub fn np_fi_residual(fs: &[Polynomial], gs: &[Polynomial]) -> Result<Polynomial> {
    let all: Vec<&Polynomial> = fs.iter().chain(gs).collect();
    let vars = common_vars(&all)?;
    let n = vars.len();
    if fs.len() + 1 != n || gs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gs.len(),
        });
    }
    let mut residual = bracket_with(fs, jacobian_bracket(gs, &vars)?, &vars)?;
    for i in 0..n {
        let mut args = gs.to_vec();
        args[i] = bracket_with(fs, gs[i].clone(), &vars)?;
        residual = &residual - &jacobian_bracket(&args, &vars)?;
    }
    Ok(residual)
}

/// `{f, g h} - g {f, h} - {f, g} h`.
pub fn leibniz_rule_residual(
    fs: &[Polynomial],
    g: &Polynomial,
    h: &Polynomial,
) -> Result<Polynomial> {
    let all: Vec<&Polynomial> = fs.iter().chain([g, h]).collect();
    let vars = common_vars(&all)?;
    if fs.len() + 1 != vars.len() {
        return Err(Error::DimensionMismatch {
            expected: vars.len() - 1,
            found: fs.len(),
        });
    }
    let lhs = bracket_with(fs, g * h, &vars)?;
    let right =
        &(g * &bracket_with(fs, h.clone(), &vars)?) + &(&bracket_with(fs, g.clone(), &vars)? * h);
    Ok(&lhs - &right)
}

/// Whether every adjacent transposition of the arguments flips the sign.
pub fn bracket_skew_check(fs: &[Polynomial]) -> Result<bool> {
    let vars = common_vars(&fs.iter().collect::<Vec<_>>())?;
    let base = jacobian_bracket(fs, &vars)?;
    for i in 0..fs.len().saturating_sub(1) {
        let mut swapped = fs.to_vec();
        swapped.swap(i, i + 1);
        if jacobian_bracket(&swapped, &vars)? != -&base {
            return Ok(false);
        }
    }
    Ok(true)
}
