//! Sparse linear algebra over Q: incremental echelon bases keyed by arbitrary ordered labels.

use super::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::ops::Bound;

pub type SparseVec<K> = BTreeMap<K, Rational>;

pub fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Rational, x: &SparseVec<K>) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let e = y.entry(k.clone()).or_insert_with(Rational::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

#[derive(Clone, Debug)]
struct Row<K> {
    vec: SparseVec<K>,
    combo: BTreeMap<usize, Rational>,
}

/// Row echelon basis; each row's pivot is its largest key, normalized to 1.
#[derive(Clone, Debug)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: BTreeMap<K, Row<K>>,
    submitted: usize,
}

impl<K: Ord + Clone> Default for EchelonBasis<K> {
    fn default() -> Self {
        EchelonBasis { rows: BTreeMap::new(), submitted: 0 }
    }
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    /// Reduce `v`; returns the remainder and the coefficients c with
    /// v = remainder + Σ c_i (i-th submitted vector).
    pub fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, BTreeMap<usize, Rational>) {
        let mut cur = v.clone();
        let mut combo: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut bound: Bound<K> = Bound::Unbounded;
        loop {
            let next = cur
                .range((Bound::Unbounded, bound.clone()))
                .rev()
                .find(|(k, _)| self.rows.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            match next {
                None => break,
                Some((k, c)) => {
                    let row = &self.rows[&k];
                    axpy(&mut cur, &(-c.clone()), &row.vec);
                    for (i, x) in &row.combo {
                        let e = combo.entry(*i).or_insert_with(Rational::zero);
                        *e += &c * x;
                    }
                    bound = Bound::Excluded(k);
                }
            }
        }
        combo.retain(|_, c| !c.is_zero());
        (cur, combo)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Insert a vector; returns true if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let id = self.submitted;
        self.submitted += 1;
        let (rem, combo) = self.reduce(v);
        if rem.is_empty() {
            return false;
        }
        let (pk, pc) = rem.iter().next_back().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let inv = pc.recip();
        let vec: SparseVec<K> = rem.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        // row = (v - Σ combo) / pc
        let mut rc: BTreeMap<usize, Rational> = combo.into_iter().map(|(i, c)| (i, -c * &inv)).collect();
        rc.insert(id, inv.clone());
        rc.retain(|_, c| !c.is_zero());
        self.rows.insert(pk, Row { vec, combo: rc });
        true
    }

    pub fn rows(&self) -> Vec<SparseVec<K>> {
        self.rows.values().map(|r| r.vec.clone()).collect()
    }
}

/// Solve A x = b for dense rational systems; returns one solution if consistent.
pub fn solve_dense(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) {
            rows.swap(r, p);
            let inv = rows[r][c].recip();
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..m {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    for j in 0..=n {
                        let t = &rows[r][j] * &f;
                        rows[i][j] -= t;
                    }
                }
            }
            piv_cols.push(c);
            r += 1;
        }
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &c) in piv_cols.iter().enumerate() {
        x[c] = rows[i][n].clone();
    }
    Some(x)
}

pub fn unit() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn echelon_combination_reconstructs() {
        let mut eb: EchelonBasis<u32> = EchelonBasis::new();
        let v0: SparseVec<u32> = [(0, rat(1)), (1, rat(2))].into_iter().collect();
        let v1: SparseVec<u32> = [(1, rat(1)), (2, rat(1))].into_iter().collect();
        assert!(eb.insert(&v0));
        assert!(eb.insert(&v1));
        let w: SparseVec<u32> = [(0, rat(2)), (1, rat(1)), (2, rat(-3))].into_iter().collect();
        let (rem, c) = eb.reduce(&w);
        assert!(rem.is_empty());
        let mut s = SparseVec::new();
        axpy(&mut s, c.get(&0).unwrap_or(&rat(0)), &v0);
        axpy(&mut s, c.get(&1).unwrap_or(&rat(0)), &v1);
        assert_eq!(s, w);
        assert!(!eb.insert(&w));
    }

    #[test]
    fn dense_solve() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let x = solve_dense(&a, &[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let a2 = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        assert!(solve_dense(&a2, &[rat(1), rat(3)]).is_none());
    }
}
