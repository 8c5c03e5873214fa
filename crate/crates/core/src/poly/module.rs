//! Gröbner bases for submodules of free modules Q[x]^r, position-over-term.
//! Ideals are the rank-one case.

use super::{divides, mono_div, mono_lcm, mono_mul, MonomialOrder, Polynomial, Rational};
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// A vector in Q[x]^r, one polynomial per position.
pub type ModuleVec = Vec<Polynomial>;

type Term = (usize, Vec<u32>, Rational);

/// Terms sorted ascending in the POT order; the leading term is last.
#[derive(Clone, Debug)]
struct Elt {
    terms: Vec<Term>,
}

fn key_cmp(order: MonomialOrder, a: (usize, &[u32]), b: (usize, &[u32])) -> Ordering {
    if a.0 != b.0 {
        // position 0 is the largest
        return b.0.cmp(&a.0);
    }
    order.cmp(a.1, b.1)
}

impl Elt {
    fn from_vec(v: &ModuleVec, order: MonomialOrder) -> Elt {
        let mut terms: Vec<Term> = Vec::new();
        for (pos, p) in v.iter().enumerate() {
            for (e, c) in p.terms() {
                terms.push((pos, e.clone(), c.clone()));
            }
        }
        terms.sort_by(|a, b| key_cmp(order, (a.0, &a.1), (b.0, &b.1)));
        Elt { terms }
    }

    fn to_vec(&self, rank: usize, nvars: usize) -> ModuleVec {
        let mut v = vec![Polynomial::zero(nvars); rank];
        for (pos, e, c) in &self.terms {
            v[*pos].add_term(e.clone(), c.clone());
        }
        v
    }

    fn lead(&self) -> Option<&Term> {
        self.terms.last()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// self - c * x^m * other
    fn sub_mul(&self, c: &Rational, m: &[u32], other: &Elt, order: MonomialOrder) -> Elt {
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted: Vec<(usize, Vec<u32>, Rational)> =
            other.terms.iter().map(|(p, e, x)| (*p, mono_mul(e, m), -(x * c))).collect();
        while i < self.terms.len() || j < shifted.len() {
            if j >= shifted.len() {
                out.push(self.terms[i].clone());
                i += 1;
            } else if i >= self.terms.len() {
                out.push(shifted[j].clone());
                j += 1;
            } else {
                let a = &self.terms[i];
                let b = &shifted[j];
                match key_cmp(order, (a.0, &a.1), (b.0, &b.1)) {
                    Ordering::Less => {
                        out.push(a.clone());
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push(b.clone());
                        j += 1;
                    }
                    Ordering::Equal => {
                        let s = &a.2 + &b.2;
                        if !s.is_zero() {
                            out.push((a.0, a.1.clone(), s));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        Elt { terms: out }
    }

    fn scale(&self, c: &Rational) -> Elt {
        Elt { terms: self.terms.iter().map(|(p, e, x)| (*p, e.clone(), x * c)).collect() }
    }
}

fn cof_sub_mul(a: &mut [Polynomial], c: &Rational, m: &[u32], b: &[Polynomial]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x - &y.mul_term(m, c);
        }
    }
}

/// A Gröbner basis of a submodule, optionally remembering how each basis
/// element is built from the original generators.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    rank: usize,
    nvars: usize,
    order: MonomialOrder,
    ngens: usize,
    elts: Vec<Elt>,
    cofs: Option<Vec<Vec<Polynomial>>>,
}

impl ModuleBasis {
    pub fn new(gens: &[ModuleVec], rank: usize, nvars: usize, order: MonomialOrder, track: bool) -> ModuleBasis {
        for g in gens {
            assert_eq!(g.len(), rank, "module vector rank mismatch");
        }
        let mut elts: Vec<Elt> = Vec::new();
        let mut cofs: Vec<Vec<Polynomial>> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let e = Elt::from_vec(g, order);
            if e.is_zero() {
                continue;
            }
            elts.push(e);
            if track {
                let mut c = vec![Polynomial::zero(nvars); gens.len()];
                c[i] = Polynomial::one(nvars);
                cofs.push(c);
            }
        }
        let mut mb = ModuleBasis {
            rank,
            nvars,
            order,
            ngens: gens.len(),
            elts,
            cofs: if track { Some(cofs) } else { None },
        };
        mb.buchberger();
        mb.interreduce();
        mb
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn find_reducer(&self, pos: usize, e: &[u32], skip: Option<usize>) -> Option<usize> {
        self.elts.iter().enumerate().position(|(k, g)| {
            if Some(k) == skip {
                return false;
            }
            let (p, m, _) = g.lead().unwrap();
            *p == pos && divides(m, e)
        })
    }

    /// Full reduction. Returns (remainder, quotient cofactors over original gens if tracked).
    fn reduce_elt(&self, f: &Elt, mut track: Option<&mut Vec<Polynomial>>, skip: Option<usize>) -> Elt {
        let mut cur = f.clone();
        let mut rem: Vec<Term> = Vec::new();
        while let Some((pos, e, c)) = cur.lead().cloned() {
            match self.find_reducer(pos, &e, skip) {
                Some(k) => {
                    let g = &self.elts[k];
                    let (_, gm, gc) = g.lead().unwrap();
                    let q = &c / gc;
                    let m = mono_div(&e, gm);
                    cur = cur.sub_mul(&q, &m, g, self.order);
                    if let (Some(w), Some(cofs)) = (track.as_deref_mut(), self.cofs.as_ref()) {
                        // witness += q x^m cof_k
                        cof_sub_mul(w, &(-q.clone()), &m, &cofs[k]);
                    }
                }
                None => {
                    cur.terms.pop();
                    rem.push((pos, e, c));
                }
            }
        }
        rem.reverse();
        Elt { terms: rem }
    }

    fn buchberger(&mut self) {
        let order = self.order;
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for j in 0..self.elts.len() {
            for i in 0..j {
                if self.elts[i].lead().unwrap().0 == self.elts[j].lead().unwrap().0 {
                    pairs.insert((i, j));
                }
            }
        }
        while !pairs.is_empty() {
            // normal strategy: smallest lcm first, ties by index
            let &(i, j) = pairs
                .iter()
                .min_by(|a, b| {
                    let la = self.pair_lcm(a.0, a.1);
                    let lb = self.pair_lcm(b.0, b.1);
                    order.cmp(&la, &lb).then(a.cmp(b))
                })
                .unwrap();
            pairs.remove(&(i, j));
            let (pi, mi, ci) = self.elts[i].lead().unwrap().clone();
            let (_, mj, cj) = self.elts[j].lead().unwrap().clone();
            let l = mono_lcm(&mi, &mj);
            if self.rank == 1 && mono_mul(&mi, &mj) == l {
                continue;
            }
            // chain criterion
            let chain = (0..self.elts.len()).any(|k| {
                if k == i || k == j {
                    return false;
                }
                let (pk, mk, _) = self.elts[k].lead().unwrap();
                *pk == pi
                    && divides(mk, &l)
                    && !pairs.contains(&(i.min(k), i.max(k)))
                    && !pairs.contains(&(j.min(k), j.max(k)))
            });
            if chain {
                continue;
            }
            let ui = mono_div(&l, &mi);
            let uj = mono_div(&l, &mj);
            let gi = self.elts[i].clone();
            let gj = self.elts[j].clone();
            let si = Elt { terms: vec![] }.sub_mul(&(-ci.recip()), &ui, &gi, order);
            let s = si.sub_mul(&cj.recip(), &uj, &gj, order);
            let mut cof = self.cofs.as_ref().map(|cofs| {
                let mut c = vec![Polynomial::zero(self.nvars); self.ngens];
                cof_sub_mul(&mut c, &(-ci.recip()), &ui, &cofs[i]);
                cof_sub_mul(&mut c, &cj.recip(), &uj, &cofs[j]);
                c
            });
            let mut quot = cof.as_ref().map(|_| vec![Polynomial::zero(self.nvars); self.ngens]);
            let r = self.reduce_elt(&s, quot.as_mut(), None);
            if r.is_zero() {
                continue;
            }
            if let (Some(c), Some(q)) = (cof.as_mut(), quot.as_ref()) {
                // r = s - quot
                for (a, b) in c.iter_mut().zip(q) {
                    *a = &*a - b;
                }
            }
            let n = self.elts.len();
            let rp = r.lead().unwrap().0;
            self.elts.push(r);
            if let (Some(cofs), Some(c)) = (self.cofs.as_mut(), cof) {
                cofs.push(c);
            }
            for k in 0..n {
                if self.elts[k].lead().unwrap().0 == rp {
                    pairs.insert((k, n));
                }
            }
        }
    }

    fn pair_lcm(&self, i: usize, j: usize) -> Vec<u32> {
        mono_lcm(&self.elts[i].lead().unwrap().1, &self.elts[j].lead().unwrap().1)
    }

    fn interreduce(&mut self) {
        // drop elements whose lead is divisible by another lead
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..self.elts.len() {
            let (pi, mi, _) = self.elts[i].lead().unwrap();
            let redundant = (0..self.elts.len()).any(|j| {
                if i == j {
                    return false;
                }
                let (pj, mj, _) = self.elts[j].lead().unwrap();
                pj == pi && divides(mj, mi) && (mj != mi || j < i)
            });
            if !redundant {
                keep.push(i);
            }
        }
        self.elts = keep.iter().map(|&i| self.elts[i].clone()).collect();
        if let Some(c) = self.cofs.as_mut() {
            *c = keep.iter().map(|&i| c[i].clone()).collect();
        }
        // tail reduction and normalization
        for i in 0..self.elts.len() {
            let lead = self.elts[i].lead().unwrap().clone();
            let mut tail = self.elts[i].clone();
            tail.terms.pop();
            let mut quot = self.cofs.as_ref().map(|_| vec![Polynomial::zero(self.nvars); self.ngens]);
            let r = self.reduce_elt(&tail, quot.as_mut(), Some(i));
            let mut new = r;
            new.terms.push(lead.clone());
            let inv = lead.2.recip();
            let new = new.scale(&inv);
            if let (Some(cofs), Some(q)) = (self.cofs.as_mut(), quot) {
                let c: Vec<Polynomial> = cofs[i].iter().zip(&q).map(|(a, b)| (a - b).scale(&inv)).collect();
                cofs[i] = c;
            }
            self.elts[i] = new;
        }
        let order = self.order;
        let mut idx: Vec<usize> = (0..self.elts.len()).collect();
        idx.sort_by(|&a, &b| {
            let (pa, ma, _) = self.elts[a].lead().unwrap();
            let (pb, mb, _) = self.elts[b].lead().unwrap();
            key_cmp(order, (*pa, ma), (*pb, mb))
        });
        self.elts = idx.iter().map(|&i| self.elts[i].clone()).collect();
        if let Some(c) = self.cofs.as_mut() {
            *c = idx.iter().map(|&i| c[i].clone()).collect();
        }
    }

    /// Normal form of `v` and, when cofactors are tracked, coefficients
    /// `w` with `v - remainder = Σ w_l gens_l`.
    pub fn reduce(&self, v: &ModuleVec) -> (ModuleVec, Option<Vec<Polynomial>>) {
        let e = Elt::from_vec(v, self.order);
        let mut w = self.cofs.as_ref().map(|_| vec![Polynomial::zero(self.nvars); self.ngens]);
        let r = self.reduce_elt(&e, w.as_mut(), None);
        (r.to_vec(self.rank, self.nvars), w)
    }

    pub fn contains(&self, v: &ModuleVec) -> bool {
        let e = Elt::from_vec(v, self.order);
        self.reduce_elt(&e, None, None).is_zero()
    }

    /// The reduced basis, sorted by leading term ascending.
    pub fn basis(&self) -> Vec<ModuleVec> {
        self.elts.iter().map(|e| e.to_vec(self.rank, self.nvars)).collect()
    }

    pub fn leading_terms(&self) -> Vec<(usize, Vec<u32>)> {
        self.elts.iter().map(|e| {
            let (p, m, _) = e.lead().unwrap();
            (*p, m.clone())
        }).collect()
    }
}

/// Decide `elt ∈ ⟨gens⟩`; on success return coefficients expressing it.
pub fn module_membership(elt: &ModuleVec, gens: &[ModuleVec], nvars: usize) -> Option<Vec<Polynomial>> {
    let rank = elt.len();
    if elt.iter().all(|p| p.is_zero()) {
        return Some(vec![Polynomial::zero(nvars); gens.len()]);
    }
    let mb = ModuleBasis::new(gens, rank, nvars, MonomialOrder::DegRevLex, true);
    let (r, w) = mb.reduce(elt);
    if r.iter().all(|p| p.is_zero()) {
        w
    } else {
        None
    }
}

pub fn module_equal(g1: &[ModuleVec], g2: &[ModuleVec], rank: usize, nvars: usize) -> bool {
    let b1 = ModuleBasis::new(g1, rank, nvars, MonomialOrder::DegRevLex, false);
    let b2 = ModuleBasis::new(g2, rank, nvars, MonomialOrder::DegRevLex, false);
    g2.iter().all(|g| b1.contains(g)) && g1.iter().all(|g| b2.contains(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn mono(nv: usize, e: &[u32], c: i64) -> Polynomial {
        Polynomial::monomial(nv, e.to_vec(), rat(c))
    }

    #[test]
    fn zero_element_is_member_with_zero_coefficients() {
        let g = vec![vec![mono(2, &[1, 0], 1)]];
        let w = module_membership(&vec![Polynomial::zero(2)], &g, 2).unwrap();
        assert!(w.iter().all(|p| p.is_zero()));
    }

    #[test]
    fn witness_reconstructs_element() {
        // rank 2 over Q[x,y]
        let g1 = vec![mono(2, &[1, 0], 1), mono(2, &[0, 1], 1)];
        let g2 = vec![mono(2, &[0, 1], 1), mono(2, &[0, 0], -1)];
        let elt = vec![
            &(&mono(2, &[2, 0], 1) * &g1[0]) + &(&mono(2, &[0, 1], 3) * &g2[0]),
            &(&mono(2, &[2, 0], 1) * &g1[1]) + &(&mono(2, &[0, 1], 3) * &g2[1]),
        ];
        let gens = vec![g1.clone(), g2.clone()];
        let w = module_membership(&elt, &gens, 2).expect("member");
        for pos in 0..2 {
            let s = &(&w[0] * &gens[0][pos]) + &(&w[1] * &gens[1][pos]);
            assert_eq!(s, elt[pos]);
        }
        let not = vec![mono(2, &[0, 0], 1), Polynomial::zero(2)];
        assert!(module_membership(&not, &gens, 2).is_none());
    }

    #[test]
    fn module_equal_detects_redundant_generator() {
        let a = vec![mono(2, &[1, 0], 1), mono(2, &[0, 0], 1)];
        let b = vec![mono(2, &[0, 1], 1), mono(2, &[0, 2], 1)];
        let s: Vec<Polynomial> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let g = vec![a.clone(), b.clone()];
        let mut g2 = g.clone();
        g2.push(s);
        assert!(module_equal(&g, &g2, 2, 2));
        assert!(!module_equal(&g, &[a], 2, 2));
    }
}
