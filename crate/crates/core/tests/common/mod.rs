//! Hand-derived monomial data and a brute-force integral-dependence oracle shared by
//! the property tests and the acceptance target.
#![allow(dead_code)]

use singforms::forms::{Coords, DiffForm};
use singforms::mero::MeroFunction;
use singforms::poly::rat;

#[derive(Clone, Copy, Debug)]
pub enum Cover {
    /// t ↦ (t^5, t^3)
    Curve35,
    /// (a, b) ↦ (a^k, b^k, ab)
    Sk(i64),
}

impl Cover {
    pub fn id(&self) -> String {
        match self {
            Cover::Curve35 => "curve35".into(),
            Cover::Sk(k) => format!("S({})", k),
        }
    }

    /// Exponents of functions on the variety: the semigroup ⟨3, 5⟩, or the
    /// invariant lattice points i ≡ j (mod k) in the quadrant.
    pub fn in_semigroup(&self, e: &[i64]) -> bool {
        match self {
            Cover::Curve35 => {
                let n = e[0];
                n >= 0 && (0..=n / 3).any(|a| (n - 3 * a) % 5 == 0)
            }
            Cover::Sk(k) => e[0] >= 0 && e[1] >= 0 && (e[0] - e[1]).rem_euclid(*k) == 0,
        }
    }

    /// Multidegrees (dt counted with t) of the pulled-back generators of Ω^q, q = 0 or top.
    pub fn omega_degrees(&self, q: usize) -> Vec<Vec<i64>> {
        match (self, q) {
            (Cover::Curve35, 0) => vec![vec![0]],
            // dx = 5t^4 dt, dy = 3t^2 dt
            (Cover::Curve35, 1) => vec![vec![5], vec![3]],
            (Cover::Sk(_), 0) => vec![vec![0, 0]],
            // dx∧dy = k² (ab)^{k-1} da∧db, dx∧dz = k a^k da∧db, dy∧dz = -k b^k da∧db
            (Cover::Sk(k), 2) => vec![vec![*k, *k], vec![k + 1, 1], vec![1, k + 1]],
            _ => panic!("degree {} is not rank one", q),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cover::Curve35 => 1,
            Cover::Sk(_) => 2,
        }
    }

    /// t^e (dt_1 ∧ ... ) on the cover; `top` picks the top-degree form.
    pub fn monomial_form(&self, e: &[i64], top: bool) -> DiffForm {
        let n = self.dim();
        let f = MeroFunction::laurent_monomial(n, e, rat(1));
        let idx: Vec<usize> = if top { (0..n).collect() } else { vec![] };
        DiffForm::term(f, &idx, Coords::Parameter)
    }

    pub fn multidegree(&self, e: &[i64], top: bool) -> Vec<i64> {
        e.iter().map(|x| if top { x + 1 } else { *x }).collect()
    }

    /// Invariant query monomials for the rank-one degrees.
    pub fn queries(&self) -> Vec<(Vec<i64>, bool)> {
        let mut out = Vec::new();
        match self {
            Cover::Curve35 => {
                for j in -3..=16 {
                    out.push((vec![j], false));
                    out.push((vec![j], true));
                }
            }
            Cover::Sk(k) => {
                for i in -k..=2 * k {
                    for j in -k..=2 * k {
                        if (i - j).rem_euclid(*k) == 0 {
                            out.push((vec![i, j], false));
                            out.push((vec![i, j], true));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Is there h ≤ max_h and generators g_1..g_h with h·d − Σ g_i a function exponent?
/// Returns the smallest such h.
pub fn brute_integral(cover: Cover, d: &[i64], gens: &[Vec<i64>], max_h: usize) -> Option<usize> {
    fn go(cover: Cover, rest: Vec<i64>, left: usize, start: usize, gens: &[Vec<i64>]) -> bool {
        if left == 0 {
            return cover.in_semigroup(&rest);
        }
        (start..gens.len()).any(|i| {
            let r: Vec<i64> = rest.iter().zip(&gens[i]).map(|(a, b)| a - b).collect();
            go(cover, r, left - 1, i, gens)
        })
    }
    (1..=max_h).find(|&h| {
        let target: Vec<i64> = d.iter().map(|x| x * h as i64).collect();
        go(cover, target, h, 0, gens)
    })
}
