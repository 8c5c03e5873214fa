//! Form grammar and printer.
//!
//! ```text
//! form    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor (('*' factor) | ('/' factor) | ('^' INT) | ('^' factor))*
//! factor  := INT | VAR | dVAR | '(' form ')'
//! ```
//! `x^2` is a power, `dx^dy` a wedge. Division is allowed by nonzero numbers and
//! by monomials in the declared pole variables. Names starting with `d` are reserved
//! for differentials.

use crate::forms::{Coords, DiffForm};
use crate::mero::MeroFunction;
use crate::poly::{fmt_rational, MonomialOrder, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
    pub text: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} at column {}", self.msg, self.pos + 1)?;
        writeln!(f, "  {}", self.text)?;
        write!(f, "  {}^", " ".repeat(self.pos))
    }
}

impl std::error::Error for ParseError {}

/// Names, coordinate tag and pole variables of a coordinate system.
#[derive(Clone, Debug, PartialEq)]
pub struct VarContext {
    pub names: Vec<String>,
    pub coords: Coords,
    pub poles: Vec<bool>,
}

impl VarContext {
    pub fn new(names: Vec<String>, coords: Coords, poles: Vec<bool>) -> Self {
        VarContext { names, coords, poles }
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Diff(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    text: &'a str,
    ctx: &'a VarContext,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn err(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into(), text: self.text.to_string() }
    }

    fn run(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let b = self.text.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match c {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '/' => Some(Tok::Slash),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(t) = single {
                self.toks.push((t, i));
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let s = i;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = self.text[s..i].parse().unwrap();
                self.toks.push((Tok::Int(n), s));
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let s = i;
                while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                    i += 1;
                }
                let word = &self.text[s..i];
                if let Some(k) = self.ctx.index(word) {
                    self.toks.push((Tok::Var(k), s));
                } else if let Some(k) = word.strip_prefix('d').and_then(|w| self.ctx.index(w)) {
                    self.toks.push((Tok::Diff(k), s));
                } else {
                    return Err(self.err(s, format!("unknown variable '{}'", word)));
                }
                continue;
            }
            return Err(self.err(i, format!("unexpected character '{}'", c)));
        }
        self.toks.push((Tok::End, self.text.len()));
        Ok(self.toks)
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ctx: &'a VarContext,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        self.at += 1;
        t
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into(), text: self.text.to_string() }
    }

    fn n(&self) -> usize {
        self.ctx.nvars()
    }

    fn add(&self, a: DiffForm, b: DiffForm, pos: usize) -> Result<DiffForm, ParseError> {
        a.add(&b).map_err(|e| self.err(pos, e.to_string()))
    }

    fn form(&mut self) -> Result<DiffForm, ParseError> {
        let mut neg = false;
        match self.peek() {
            Tok::Plus => {
                self.bump();
            }
            Tok::Minus => {
                self.bump();
                neg = true;
            }
            _ => {}
        }
        let p0 = self.pos();
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        let _ = p0;
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(acc, t, pos)?;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(acc, t.neg(), pos)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn int_exponent(&mut self) -> Result<Option<i64>, ParseError> {
        // after '^': optional '-' then INT
        let save = self.at;
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        if let Tok::Int(n) = self.peek().clone() {
            self.bump();
            let v: i64 = n.try_into().map_err(|_| self.err(self.pos(), "exponent too large"))?;
            return Ok(Some(if neg { -v } else { v }));
        }
        self.at = save;
        Ok(None)
    }

    /// factor with optional integer powers
    fn powered(&mut self) -> Result<DiffForm, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Caret {
            let pos = self.pos();
            let save = self.at;
            self.bump();
            match self.int_exponent()? {
                Some(e) => acc = self.power(acc, e, pos)?,
                None => {
                    self.at = save;
                    break;
                }
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DiffForm, ParseError> {
        let mut acc = self.powered()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let f = self.powered()?;
                    acc = acc.wedge(&f).map_err(|e| self.err(pos, e.to_string()))?;
                }
                Tok::Slash => {
                    self.bump();
                    let fpos = self.pos();
                    let f = self.powered()?;
                    acc = self.divide(acc, f, fpos)?;
                }
                Tok::Caret => {
                    self.bump();
                    let f = self.powered()?;
                    if acc.degree() == 0 || f.degree() == 0 {
                        return Err(self.err(pos, "'^' between forms must join differentials"));
                    }
                    acc = acc.wedge(&f).map_err(|e| self.err(pos, e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&self, base: DiffForm, e: i64, pos: usize) -> Result<DiffForm, ParseError> {
        if base.degree() != 0 {
            return Err(self.err(pos, "power of a differential"));
        }
        let f = base.component(&[]);
        if e >= 0 {
            return Ok(DiffForm::function(f.pow(e as u32), self.ctx.coords));
        }
        let m = self.monomial_of(&f, pos)?;
        let inv = self.invert_monomial(m, pos)?;
        Ok(DiffForm::function(inv.pow((-e) as u32), self.ctx.coords))
    }

    /// Return (coefficient, exponents) if f is a single term with non-negative exponents.
    fn monomial_of(&self, f: &MeroFunction, pos: usize) -> Result<(Rational, Vec<u32>), ParseError> {
        if f.is_zero() {
            return Err(self.err(pos, "division by zero"));
        }
        if !f.is_polynomial() {
            return Err(self.err(pos, "only numbers and monomials may appear in denominators"));
        }
        match f.numerator().as_term() {
            Some((e, c)) => Ok((c.clone(), e.clone())),
            None => Err(self.err(pos, "only numbers and monomials may appear in denominators")),
        }
    }

    fn invert_monomial(&self, (c, e): (Rational, Vec<u32>), pos: usize) -> Result<MeroFunction, ParseError> {
        for (i, &k) in e.iter().enumerate() {
            if k > 0 && !self.ctx.poles[i] {
                return Err(self.err(pos, format!("negative exponent on '{}', which is not a pole variable", self.ctx.names[i])));
            }
        }
        Ok(MeroFunction::new(Polynomial::constant(self.n(), c.recip()), e))
    }

    fn divide(&self, num: DiffForm, den: DiffForm, pos: usize) -> Result<DiffForm, ParseError> {
        if den.degree() != 0 {
            return Err(self.err(pos, "division by a differential"));
        }
        let m = self.monomial_of(&den.component(&[]), pos)?;
        let inv = self.invert_monomial(m, pos)?;
        Ok(num.mul_fn(&inv))
    }

    fn factor(&mut self) -> Result<DiffForm, ParseError> {
        let pos = self.pos();
        let n = self.n();
        let coords = self.ctx.coords;
        match self.bump() {
            Tok::Int(v) => Ok(DiffForm::function(MeroFunction::constant(n, Rational::from_integer(v)), coords)),
            Tok::Var(i) => Ok(DiffForm::poly(Polynomial::var(n, i), coords)),
            Tok::Diff(i) => Ok(DiffForm::differential(n, i, coords)),
            Tok::LParen => {
                let f = self.form()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err(self.pos(), "expected ')'"));
                }
                self.bump();
                Ok(f)
            }
            Tok::End => Err(self.err(pos, "unexpected end of input")),
            t => Err(self.err(pos, format!("unexpected token {:?}", t))),
        }
    }
}

pub fn parse_form(text: &str, ctx: &VarContext) -> Result<DiffForm, ParseError> {
    let toks = Lexer { text, ctx, toks: Vec::new() }.run()?;
    let mut p = Parser { toks, at: 0, ctx, text };
    if *p.peek() == Tok::End {
        return Err(p.err(0, "empty form"));
    }
    let f = p.form()?;
    if *p.peek() != Tok::End {
        return Err(p.err(p.pos(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parse a polynomial (a degree-0 form without poles).
pub fn parse_poly(text: &str, names: &[String]) -> Result<Polynomial, ParseError> {
    let ctx = VarContext::new(names.to_vec(), Coords::Ambient, vec![false; names.len()]);
    let f = parse_form(text, &ctx)?;
    if f.degree() != 0 {
        return Err(ParseError { pos: 0, msg: "expected a function, found a form".into(), text: text.into() });
    }
    Ok(f.component(&[]).numerator().clone())
}

/// Parse a rational constant such as `-3/8`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    parse_poly(text, &[])?
        .constant_value()
        .ok_or_else(|| ParseError { pos: 0, msg: "expected a rational number".into(), text: text.into() })
}

fn fmt_term(c: &Rational, e: &[i64], idx: &[usize], names: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let num: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
        .collect();
    let den: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k < 0)
        .map(|(i, &k)| if k == -1 { names[i].clone() } else { format!("{}^{}", names[i], -k) })
        .collect();
    let a = c.abs();
    if !a.is_one() || (num.is_empty() && idx.is_empty()) {
        parts.push(fmt_rational(&a));
    }
    parts.extend(num);
    if parts.is_empty() && !den.is_empty() {
        parts.push("1".into());
    }
    let mut s = parts.join("*");
    for d in den {
        s.push('/');
        s.push_str(&d);
    }
    if !idx.is_empty() {
        let diffs: Vec<String> = idx.iter().map(|&i| format!("d{}", names[i])).collect();
        if !s.is_empty() {
            s.push('*');
        }
        s.push_str(&diffs.join("^"));
    }
    s
}

pub fn print_form(u: &DiffForm, names: &[String]) -> String {
    if u.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    let mut first = true;
    for (idx, f) in u.components() {
        let mut ts: Vec<(Vec<i64>, Rational)> = f.laurent_terms().into_iter().collect();
        // descending degrevlex on the shifted exponents
        let shift: i64 = ts.iter().flat_map(|(e, _)| e.iter().copied()).min().unwrap_or(0).min(0);
        let key = |e: &Vec<i64>| e.iter().map(|&k| (k - shift) as u32).collect::<Vec<u32>>();
        ts.sort_by(|a, b| MonomialOrder::DegRevLex.cmp(&key(&b.0), &key(&a.0)));
        for (e, c) in ts {
            let neg = c.is_negative();
            if first {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            first = false;
            out.push_str(&fmt_term(&c, &e, idx, names));
        }
    }
    out
}

pub fn print_poly(p: &Polynomial, names: &[String]) -> String {
    print_form(&DiffForm::poly(p.clone(), Coords::Ambient), names)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VarContext {
        VarContext::new(vec!["x".into(), "y".into(), "z".into()], Coords::Ambient, vec![false, false, true])
    }

    #[test]
    fn antisymmetry_in_grammar() {
        let c = ctx();
        let a = parse_form("dx^dy - dy^dx", &c).unwrap();
        let b = parse_form("2*dx^dy", &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn caret_points_at_offending_token() {
        let c = ctx();
        let e = parse_form("x*dw", &c).unwrap_err();
        assert_eq!(e.pos, 2);
        assert!(e.to_string().contains("unknown variable"));
        let e = parse_form("dx/x", &c).unwrap_err();
        assert_eq!(e.pos, 3);
        assert!(e.msg.contains("pole"));
        let e = parse_form("x^-1*dy", &c).unwrap_err();
        assert!(e.msg.contains("pole"));
    }

    #[test]
    fn roundtrip_examples() {
        let c = ctx();
        for s in ["x*dy/z^2", "3/2*x^2*y/z^3*dx^dy - dz^dx", "x + y/z", "-1/z*dx^dy^dz", "7"] {
            let f = parse_form(s, &c).unwrap();
            let p = print_form(&f, &c.names);
            assert_eq!(parse_form(&p, &c).unwrap(), f, "{} -> {}", s, p);
        }
    }

    #[test]
    fn power_binds_to_last_factor() {
        let c = ctx();
        assert_eq!(parse_form("2*x^2", &c).unwrap(), parse_form("2*x*x", &c).unwrap());
        assert_eq!(parse_form("x/z^2", &c).unwrap(), parse_form("x*z^-2", &c).unwrap());
    }

    #[test]
    fn division_by_number() {
        let c = ctx();
        let f = parse_form("x/2*dy", &c).unwrap();
        assert_eq!(print_form(&f, &c.names), "1/2*x*dy");
    }
}
