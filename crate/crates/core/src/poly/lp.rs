//! Exact two-phase simplex with Bland's rule.

use super::Rational;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rational>, value: Rational },
}

struct Tableau {
    rows: Vec<Vec<Rational>>, // each row: coefficients then rhs
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, z: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= p * &f;
                }
            }
        }
        if !z[c].is_zero() {
            let f = z[c].clone();
            for (x, p) in z.iter_mut().zip(&prow) {
                *x -= p * &f;
            }
        }
        self.basis[r] = c;
    }

    /// z holds d_j = c_B B^-1 A_j - c_j (and -objective value in the rhs slot).
    fn run(&mut self, z: &mut [Rational], allowed: usize) -> bool {
        loop {
            let enter = (0..allowed).find(|&j| z[j].is_negative());
            let Some(c) = enter else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.ncols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c, z),
            }
        }
    }
}

/// Maximize c·x subject to A x = b and x ≥ 0.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpResult {
    let m = a.len();
    let n = c.len();
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Rational> = a[i].iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
        for k in 0..m {
            row.push(if k == i { Rational::from_integer(1.into()) } else { Rational::zero() });
        }
        row.push(if neg { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), ncols };
    // phase one: maximize -Σ artificials
    let mut z = vec![Rational::zero(); ncols + 1];
    for row in &t.rows {
        for j in 0..n {
            z[j] -= &row[j];
        }
        z[ncols] -= &row[ncols];
    }
    t.run(&mut z, n);
    if !z[ncols].is_zero() {
        return LpResult::Infeasible;
    }
    // drive artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j, &mut z);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    // phase two
    let mut z = vec![Rational::zero(); ncols + 1];
    for j in 0..n {
        z[j] = -c[j].clone();
    }
    for (i, row) in t.rows.iter().enumerate() {
        let cb = c[t.basis[i]].clone();
        if !cb.is_zero() {
            for j in 0..=ncols {
                z[j] += &row[j] * &cb;
            }
        }
    }
    if !t.run(&mut z, n) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][ncols].clone();
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).fold(Rational::zero(), |s, v| s + v);
    LpResult::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn small_program() {
        // max x + y, x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![rat(1), rat(2), rat(1), rat(0)], vec![rat(3), rat(1), rat(0), rat(1)]];
        let r = maximize(&a, &[rat(4), rat(6)], &[rat(1), rat(1), rat(0), rat(0)]);
        match r {
            LpResult::Optimal { value, .. } => assert_eq!(value, crate::poly::ratio(14, 5)),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![rat(1), rat(1)]];
        assert_eq!(maximize(&a, &[rat(-1)], &[rat(0), rat(0)]), LpResult::Infeasible);
        let a = vec![vec![rat(1), rat(-1)]];
        assert_eq!(maximize(&a, &[rat(1)], &[rat(1), rat(0)]), LpResult::Unbounded);
    }
}
