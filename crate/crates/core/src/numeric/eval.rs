//! Compiled floating-point evaluators for polynomials, meromorphic functions and forms.

use crate::forms::DiffForm;
use crate::mero::MeroFunction;
use crate::poly::{rat_to_f64, Polynomial};
use num_complex::Complex64;

pub type C = Complex64;

#[derive(Clone, Debug)]
pub struct NumPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl NumPoly {
    pub fn new(p: &Polynomial) -> Self {
        NumPoly { terms: p.terms().iter().map(|(e, c)| (e.clone(), rat_to_f64(c))).collect() }
    }

    pub fn eval(&self, pt: &[C]) -> C {
        let mut s = C::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = C::new(*c, 0.0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= pt[i].powu(k);
                }
            }
            s += m;
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct NumMero {
    num: NumPoly,
    den: Vec<u32>,
}

impl NumMero {
    pub fn new(f: &MeroFunction) -> Self {
        NumMero { num: NumPoly::new(f.numerator()), den: f.denominator().clone() }
    }

    pub fn eval(&self, pt: &[C]) -> C {
        let mut d = C::new(1.0, 0.0);
        for (i, &k) in self.den.iter().enumerate() {
            if k > 0 {
                d *= pt[i].powu(k);
            }
        }
        self.num.eval(pt) / d
    }
}

/// An ambient form ready for numeric pullback along a patch.
#[derive(Clone, Debug)]
pub struct NumForm {
    pub degree: usize,
    comps: Vec<(Vec<usize>, NumMero)>,
}

impl NumForm {
    pub fn new(u: &DiffForm) -> Self {
        NumForm { degree: u.degree(), comps: u.components().iter().map(|(i, f)| (i.clone(), NumMero::new(f))).collect() }
    }

    /// Coefficients of the pullback on the patch: entry j is the coefficient of
    /// ds_1∧…∧ds_p with ds_{cols[j]} omitted when degree = p - 1, or the single top
    /// coefficient when degree = p. `jac[i][k]` = ∂x_i/∂s_k.
    pub fn pull(&self, x: &[C], jac: &[Vec<C>], cols: &[usize]) -> C {
        let mut s = C::new(0.0, 0.0);
        for (idx, f) in &self.comps {
            let m: Vec<Vec<C>> = idx.iter().map(|&i| cols.iter().map(|&k| jac[i][k]).collect()).collect();
            s += f.eval(x) * det(m);
        }
        s
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    let mut d = C::new(1.0, 0.0);
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].norm().partial_cmp(&m[b][c].norm()).unwrap()).unwrap();
        if m[piv][c].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] -= f * v;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn det_small() {
        let m = vec![vec![C::new(1.0, 0.0), C::new(2.0, 0.0)], vec![C::new(3.0, 0.0), C::new(4.0, 0.0)]];
        assert!((det(m) - C::new(-2.0, 0.0)).norm() < 1e-12);
        assert_eq!(det(vec![]), C::new(1.0, 0.0));
    }

    #[test]
    fn poly_eval_matches_exact() {
        let names = vec!["a".to_string(), "b".to_string()];
        let p = parse_poly("3*a^2*b - 1/2*b^3 + 7", &names).unwrap();
        let v = NumPoly::new(&p).eval(&[C::new(2.0, 0.0), C::new(-1.0, 0.0)]);
        assert!((v - C::new(-12.0 + 0.5 + 7.0, 0.0)).norm() < 1e-12);
    }
}
