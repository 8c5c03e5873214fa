//! Meromorphic functions with monomial denominators (Laurent polynomials).

use crate::poly::{mono_mul, rat, Exponents, Polynomial, Rational};
use num_complex::Complex64;
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeroError {
    #[error("denominator pulls back to zero")]
    ZeroDenominator,
    #[error("denominator pulls back to a non-monomial {0}")]
    NonMonomialDenominator(String),
}

/// numerator / x^den, with no variable dividing both.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MeroFunction {
    num: Polynomial,
    den: Exponents,
}

impl MeroFunction {
    pub fn new(num: Polynomial, den: Exponents) -> Self {
        assert_eq!(num.nvars(), den.len(), "denominator length mismatch");
        if num.is_zero() {
            let n = den.len();
            return MeroFunction { num, den: vec![0; n] };
        }
        let content = num.monomial_content();
        let cancel: Exponents = content.iter().zip(&den).map(|(a, b)| *a.min(b)).collect();
        if cancel.iter().all(|&c| c == 0) {
            return MeroFunction { num, den };
        }
        let num = num.div_monomial(&cancel);
        let den = den.iter().zip(&cancel).map(|(a, b)| a - b).collect();
        MeroFunction { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        MeroFunction { num: p, den: vec![0; n] }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    /// c · x^e with signed exponents.
    pub fn laurent_monomial(nvars: usize, e: &[i64], c: Rational) -> Self {
        let pos: Exponents = e.iter().map(|&k| k.max(0) as u32).collect();
        let neg: Exponents = e.iter().map(|&k| (-k).max(0) as u32).collect();
        MeroFunction::new(Polynomial::monomial(nvars, pos, c), neg)
    }

    pub fn from_laurent<I: IntoIterator<Item = (Vec<i64>, Rational)>>(nvars: usize, it: I) -> Self {
        let mut acc = MeroFunction::zero(nvars);
        for (e, c) in it {
            acc = &acc + &MeroFunction::laurent_monomial(nvars, &e, c);
        }
        acc
    }

    pub fn nvars(&self) -> usize {
        self.den.len()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Exponents {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.iter().all(|&d| d == 0)
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Terms with signed exponents, in ascending exponent order.
    pub fn laurent_terms(&self) -> BTreeMap<Vec<i64>, Rational> {
        self.num
            .terms()
            .iter()
            .map(|(e, c)| (e.iter().zip(&self.den).map(|(a, b)| *a as i64 - *b as i64).collect(), c.clone()))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        MeroFunction::new(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        MeroFunction::new(&self.num * p, self.den.clone())
    }

    pub fn div_monomial(&self, m: &[u32]) -> Self {
        MeroFunction::new(self.num.clone(), mono_mul(&self.den, m))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MeroFunction::constant(self.nvars(), Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        // d(N / x^D) = dN / x^D - D_i N / x^(D + e_i)
        let n = self.nvars();
        let a = MeroFunction::new(self.num.derivative(var), self.den.clone());
        if self.den[var] == 0 {
            return a;
        }
        let mut d2 = self.den.clone();
        d2[var] += 1;
        let b = MeroFunction::new(self.num.scale(&rat(self.den[var] as i64)), d2);
        let _ = n;
        &a - &b
    }

    /// Substitute polynomials for each variable; the denominator must map to a single term.
    pub fn compose(&self, subs: &[Polynomial]) -> Result<MeroFunction, MeroError> {
        let target = subs.first().map(|p| p.nvars()).unwrap_or(0);
        let num = self.num.compose(subs);
        let mut den = Polynomial::one(target);
        for (i, &k) in self.den.iter().enumerate() {
            if k > 0 {
                den = &den * &subs[i].pow(k);
            }
        }
        if den.is_zero() {
            return Err(MeroError::ZeroDenominator);
        }
        match den.as_term() {
            Some((e, c)) => Ok(MeroFunction::new(num.scale(&c.recip()), e.clone())),
            None => Err(MeroError::NonMonomialDenominator(den.to_string())),
        }
    }

    pub fn remap(&self, nvars: usize, map: &[usize]) -> MeroFunction {
        let mut den = vec![0; nvars];
        for (i, &k) in self.den.iter().enumerate() {
            den[map[i]] += k;
        }
        MeroFunction::new(self.num.remap(nvars, map), den)
    }

    pub fn eval_complex(&self, pt: &[Complex64]) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for (i, &k) in self.den.iter().enumerate() {
            if k > 0 {
                d *= pt[i].powu(k);
            }
        }
        self.num.eval_complex(pt) / d
    }

    /// Write as N / x^D with the given (larger) denominator.
    pub fn numerator_over(&self, den: &[u32]) -> Polynomial {
        let extra: Exponents = den.iter().zip(&self.den).map(|(a, b)| a - b).collect();
        self.num.mul_term(&extra, &Rational::one())
    }
}

pub fn lcm_denominators<'a, I: IntoIterator<Item = &'a MeroFunction>>(nvars: usize, it: I) -> Exponents {
    let mut d = vec![0; nvars];
    for f in it {
        for (a, b) in d.iter_mut().zip(&f.den) {
            *a = (*a).max(*b);
        }
    }
    d
}

impl<'a> std::ops::Add<&'a MeroFunction> for &'a MeroFunction {
    type Output = MeroFunction;
    fn add(self, o: &MeroFunction) -> MeroFunction {
        let d = lcm_denominators(self.nvars(), [self, o]);
        MeroFunction::new(&self.numerator_over(&d) + &o.numerator_over(&d), d)
    }
}

impl<'a> std::ops::Sub<&'a MeroFunction> for &'a MeroFunction {
    type Output = MeroFunction;
    fn sub(self, o: &MeroFunction) -> MeroFunction {
        let d = lcm_denominators(self.nvars(), [self, o]);
        MeroFunction::new(&self.numerator_over(&d) - &o.numerator_over(&d), d)
    }
}

impl<'a> std::ops::Mul<&'a MeroFunction> for &'a MeroFunction {
    type Output = MeroFunction;
    fn mul(self, o: &MeroFunction) -> MeroFunction {
        MeroFunction::new(&self.num * &o.num, mono_mul(&self.den, &o.den))
    }
}

impl std::ops::Neg for &MeroFunction {
    type Output = MeroFunction;
    fn neg(self) -> MeroFunction {
        MeroFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl std::ops::Add for MeroFunction {
    type Output = MeroFunction;
    fn add(self, o: MeroFunction) -> MeroFunction {
        &self + &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_cancels_common_monomials() {
        // (x z^2 + z^3) / z^5 = (x + z) / z^3
        let num = Polynomial::from_terms(2, vec![(vec![1, 2], rat(1)), (vec![0, 3], rat(1))]);
        let f = MeroFunction::new(num, vec![0, 5]);
        assert_eq!(f.denominator(), &vec![0, 3]);
        assert_eq!(f.numerator(), &Polynomial::from_terms(2, vec![(vec![1, 0], rat(1)), (vec![0, 1], rat(1))]));
    }

    #[test]
    fn derivative_of_inverse_power() {
        // d/dz (x / z^2) = -2 x / z^3
        let f = MeroFunction::laurent_monomial(2, &[1, -2], rat(1));
        assert_eq!(f.derivative(1), MeroFunction::laurent_monomial(2, &[1, -3], rat(-2)));
        assert_eq!(f.derivative(0), MeroFunction::laurent_monomial(2, &[0, -2], rat(1)));
    }

    #[test]
    fn compose_monomial_denominator() {
        // 1/z at z = a b
        let f = MeroFunction::laurent_monomial(1, &[-1], rat(1));
        let ab = Polynomial::monomial(2, vec![1, 1], rat(2));
        let g = f.compose(&[ab]).unwrap();
        assert_eq!(g, MeroFunction::laurent_monomial(2, &[-1, -1], crate::poly::ratio(1, 2)));
        let bad = Polynomial::from_terms(2, vec![(vec![1, 0], rat(1)), (vec![0, 1], rat(1))]);
        assert!(matches!(f.compose(&[bad]), Err(MeroError::NonMonomialDenominator(_))));
    }
}
