//! `{k-m-1}` style placeholders in fixture strings.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Replace every `{expr}` by its integer value; expressions use + - * / (floor),
/// parentheses, integers and the given variables.
pub fn instantiate(text: &str, vars: &BTreeMap<String, i64>) -> Result<String> {
    let mut out = String::new();
    let mut rest = text;
    while let Some(i) = rest.find('{') {
        out.push_str(&rest[..i]);
        let j = rest[i..].find('}').ok_or_else(|| Error::InvalidParameter(format!("unclosed placeholder in '{}'", text)))?;
        let expr = &rest[i + 1..i + j];
        out.push_str(&eval(expr, vars)?.to_string());
        rest = &rest[i + j + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub fn eval(expr: &str, vars: &BTreeMap<String, i64>) -> Result<i64> {
    let toks: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { t: &toks, i: 0, vars, src: expr };
    let v = p.sum()?;
    if p.i != toks.len() {
        return Err(p.err());
    }
    Ok(v)
}

struct Parser<'a> {
    t: &'a [char],
    i: usize,
    vars: &'a BTreeMap<String, i64>,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self) -> Error {
        Error::InvalidParameter(format!("bad template expression '{}'", self.src))
    }

    fn sum(&mut self) -> Result<i64> {
        let mut v = self.product()?;
        while self.i < self.t.len() && (self.t[self.i] == '+' || self.t[self.i] == '-') {
            let op = self.t[self.i];
            self.i += 1;
            let r = self.product()?;
            v = if op == '+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<i64> {
        let mut v = self.atom()?;
        loop {
            match self.t.get(self.i) {
                Some('*') => {
                    self.i += 1;
                    v *= self.atom()?;
                }
                Some('/') => {
                    self.i += 1;
                    let r = self.atom()?;
                    if r == 0 {
                        return Err(self.err());
                    }
                    v = v.div_euclid(r);
                }
                // implicit product such as 2m
                Some(c) if c.is_alphabetic() || *c == '(' => v *= self.atom()?,
                _ => return Ok(v),
            }
        }
    }

    fn atom(&mut self) -> Result<i64> {
        match self.t.get(self.i).copied() {
            Some('-') => {
                self.i += 1;
                Ok(-self.atom()?)
            }
            Some('(') => {
                self.i += 1;
                let v = self.sum()?;
                if self.t.get(self.i) != Some(&')') {
                    return Err(self.err());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.t.len() && self.t[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let s: String = self.t[start..self.i].iter().collect();
                s.parse().map_err(|_| self.err())
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.i;
                while self.i < self.t.len() && self.t[self.i].is_alphanumeric() {
                    self.i += 1;
                }
                let name: String = self.t[start..self.i].iter().collect();
                self.vars.get(&name).copied().ok_or_else(|| Error::InvalidParameter(format!("unknown template variable '{}'", name)))
            }
            _ => Err(self.err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholders() {
        let vars: BTreeMap<String, i64> = [("k".to_string(), 5), ("m".to_string(), 2)].into_iter().collect();
        assert_eq!(instantiate("x*dy/z^{m}", &vars).unwrap(), "x*dy/z^2");
        assert_eq!(instantiate("u^{k-2m}*v + u^{k-m-1}", &vars).unwrap(), "u^1*v + u^2");
        assert_eq!(eval("(k+1)/2", &vars).unwrap(), 3);
        assert!(instantiate("{q}", &vars).is_err());
    }
}
