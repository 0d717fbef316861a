//! Text syntax for polynomials.
//!
//! ```text
//! poly   := [sign] term (('+'|'-') term)*
//! term   := coeff | [coeff] factor {factor}
//! factor := atom ["'"]
//! atom   := var | '[' poly (',' poly)+ ']' | '(' poly ')'
//! var    := ('y'|'z') digits
//! coeff  := integer ['/' integer]
//! ```
//!
//! Juxtaposition is the product, `'` the involution and brackets left-normed
//! commutators. Whitespace is ignored.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::freealg::{left_normed, FreePoly, FreeVar};
use crate::scalars::{FieldSpec, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown variable `{name}` at line {line}, column {col}")]
    UnknownVariable { line: usize, col: usize, name: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coeff {
    pub num: BigInt,
    pub den: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub terms: Vec<(Sign, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Option<Coeff>,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub atom: Atom,
    pub star: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Var(FreeVar),
    Bracket(Vec<Poly>),
    Paren(Box<Poly>),
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.den {
            Some(d) => write!(f, "{}/{}", self.num, d),
            None => write!(f, "{}", self.num),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (sign, term)) in self.terms.iter().enumerate() {
            match (k, sign) {
                (0, Sign::Plus) => {}
                (0, Sign::Minus) => f.write_str("-")?,
                (_, Sign::Plus) => f.write_str(" + ")?,
                (_, Sign::Minus) => f.write_str(" - ")?,
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.coeff {
            write!(f, "{c}")?;
            if !self.factors.is_empty() {
                f.write_str(" ")?;
            }
        }
        for x in &self.factors {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.atom {
            Atom::Var(v) => write!(f, "{v}")?,
            Atom::Bracket(args) => {
                f.write_str("[")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")?;
            }
            Atom::Paren(p) => write!(f, "({p})")?,
        }
        if self.star {
            f.write_str("'")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn location(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at.min(self.src.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let col = at - before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1) + 1;
        (line, col)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.location(self.pos);
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut terms = Vec::new();
        let first = if self.eat(b'-') {
            Sign::Minus
        } else {
            self.eat(b'+');
            Sign::Plus
        };
        terms.push((first, self.term()?));
        loop {
            let sign = match self.peek() {
                Some(b'+') => Sign::Plus,
                Some(b'-') => Sign::Minus,
                _ => break,
            };
            self.pos += 1;
            terms.push((sign, self.term()?));
        }
        Ok(Poly { terms })
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(b'[' | b'(')) || matches!(self.peek(), Some(c) if c.is_ascii_alphabetic())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().expect("digit").parse().expect("digits");
                let den = if self.eat(b'/') {
                    self.skip_ws();
                    match self.digits() {
                        Some(d) => Some(d.parse().expect("digits")),
                        None => return self.error("expected a denominator"),
                    }
                } else {
                    None
                };
                Some(Coeff { num, den })
            }
            _ => None,
        };
        let mut factors = Vec::new();
        while self.starts_factor() {
            factors.push(self.factor()?);
        }
        if coeff.is_none() && factors.is_empty() {
            return match self.peek() {
                Some(c) => self.error(format!("unexpected `{}`", c as char)),
                None => self.error("unexpected end of input"),
            };
        }
        Ok(Term { coeff, factors })
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let atom = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut args = vec![self.poly()?];
                while self.eat(b',') {
                    args.push(self.poly()?);
                }
                if args.len() < 2 {
                    return self.error("a commutator needs at least two entries");
                }
                if !self.eat(b']') {
                    return self.error("expected `]`");
                }
                Atom::Bracket(args)
            }
            Some(b'(') => {
                self.pos += 1;
                let p = self.poly()?;
                if !self.eat(b')') {
                    return self.error("expected `)`");
                }
                Atom::Paren(Box::new(p))
            }
            _ => Atom::Var(self.var()?),
        };
        let star = self.eat(b'\'');
        Ok(Factor { atom, star })
    }

    fn var(&mut self) -> Result<FreeVar, ParseError> {
        let start = self.pos;
        let letter = self.src[self.pos];
        self.pos += 1;
        let index = self.digits().and_then(|d| d.parse::<u32>().ok()).filter(|&i| i > 0);
        match (letter, index) {
            (b'y', Some(i)) => Ok(FreeVar::y(i)),
            (b'z', Some(i)) => Ok(FreeVar::z(i)),
            _ => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let (line, col) = self.location(start);
                Err(ParseError::UnknownVariable {
                    line,
                    col,
                    name: String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                })
            }
        }
    }
}

/// Parses the whole input into a syntax tree.
pub fn parse_ast(src: &str) -> Result<Poly, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let poly = p.poly()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(poly)
}

impl Poly {
    pub fn eval(&self, field: FieldSpec) -> Result<FreePoly, ParseError> {
        let mut out = FreePoly::zero(field);
        for (sign, t) in &self.terms {
            let v = t.eval(field)?;
            out = match sign {
                Sign::Plus => &out + &v,
                Sign::Minus => &out - &v,
            };
        }
        Ok(out)
    }
}

impl Term {
    fn eval(&self, field: FieldSpec) -> Result<FreePoly, ParseError> {
        let mut out = match &self.coeff {
            Some(c) => {
                let den = c.den.clone().unwrap_or_else(|| BigInt::from(1));
                FreePoly::constant(field.from_fraction(&c.num, &den)?)
            }
            None => FreePoly::one(field),
        };
        for x in &self.factors {
            out = &out * &x.eval(field)?;
        }
        Ok(out)
    }
}

impl Factor {
    fn eval(&self, field: FieldSpec) -> Result<FreePoly, ParseError> {
        let v = match &self.atom {
            Atom::Var(v) => FreePoly::var(field, *v),
            Atom::Paren(p) => p.eval(field)?,
            Atom::Bracket(args) => {
                let args = args.iter().map(|a| a.eval(field)).collect::<Result<Vec<_>, _>>()?;
                left_normed(&args).expect("at least two entries")
            }
        };
        Ok(if self.star { v.involution() } else { v })
    }
}

/// Parses `src` with coefficients in `field`.
pub fn parse(src: &str, field: FieldSpec) -> Result<FreePoly, ParseError> {
    parse_ast(src)?.eval(field)
}
