//! Generators of α^q and L^q on a cover model, one multidegree at a time.
//!
//! For each deck-invariant multidegree d in a box, V_d is the space of holomorphic
//! forms t^{d-1_I} dt_I and M_d the part of the module found so far. For L every
//! vector of V_d is kept. For α in rank one the Newton polyhedron decides; in higher
//! rank the stock arcs bound α_d from above and certificates from below, and the
//! two bounds must meet. The box is accepted once V_d = M_d on the shell
//! [0, B+e] \ [0, B]: beyond it every V_d is u_j·V_{d - e_j} for a base coordinate u_j.

use super::arc::{stock_arcs, ArcSpec};
use super::certificate::DependenceCertificate;
use super::monomial::{decide_degree, MonomialDecision};
use super::search::search_certificate;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::poly::linalg::{EchelonBasis, SparseVec};
use crate::poly::Rational;
use crate::variety::{Model, ParamModel};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeedKind {
    Alpha,
    L,
}

#[derive(Clone, Debug)]
pub enum SeedOrigin {
    Omega(usize),
    /// Kept because every holomorphic invariant form is in L.
    Holomorphic(Vec<i64>),
    /// Rank-one Newton polyhedron decision.
    Polyhedron(Vec<i64>),
    Certificate(Vec<i64>, Box<DependenceCertificate>),
}

#[derive(Clone, Debug)]
pub struct SeedSet {
    pub variety: String,
    pub q: usize,
    pub kind: SeedKind,
    pub gens: Vec<DiffForm>,
    pub origins: Vec<SeedOrigin>,
    /// Final box bound.
    pub bound: Vec<i64>,
    /// Every rank-one decision taken during the sweep.
    pub decisions: Vec<MonomialDecision>,
}

/// Maximum number of box doublings.
const MAX_DOUBLINGS: usize = 3;
const ARC_WEIGHT: i64 = 4;
const CERT_DEGREE: usize = 3;

fn boxed(b: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &bj in b {
        let mut next = Vec::new();
        for p in &out {
            for x in 0..=bj {
                let mut p = p.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    out
}

fn unit(idx: &[usize]) -> SparseVec<Vec<usize>> {
    let mut v = SparseVec::new();
    v.insert(idx.to_vec(), Rational::one());
    v
}

/// Basis of {x ∈ Q^m : Σ x_i r_i = 0}.
fn kernel(rs: &[SparseVec<Vec<usize>>]) -> Vec<Vec<Rational>> {
    let mut eb = EchelonBasis::new();
    let mut out = Vec::new();
    for (i, r) in rs.iter().enumerate() {
        let (_, combo) = eb.reduce(r);
        if !eb.insert(r) {
            let mut x = vec![Rational::zero(); rs.len()];
            x[i] = Rational::one();
            for (j, c) in combo {
                x[j] -= c;
            }
            out.push(x);
        }
    }
    out
}

fn normalized(v: &SparseVec<Vec<usize>>, d: &[i64], arc: &ArcSpec) -> SparseVec<Vec<usize>> {
    v.iter()
        .map(|(idx, c)| {
            let mut r = c.clone();
            for (j, cj) in arc.consts.iter().enumerate() {
                let e = d[j] - idx.contains(&j) as i64;
                let p = num_traits::pow(cj.clone(), e.unsigned_abs() as usize);
                if e >= 0 {
                    r *= p;
                } else {
                    r /= p;
                }
            }
            (idx.clone(), r)
        })
        .collect()
}

/// Restrict the subspace spanned by `basis` to the elements that pass the arc test.
fn cut_by_arc(basis: Vec<SparseVec<Vec<usize>>>, d: &[i64], omega: &[(Vec<i64>, SparseVec<Vec<usize>>)], arc: &ArcSpec) -> Vec<SparseVec<Vec<usize>>> {
    if basis.is_empty() {
        return basis;
    }
    let a: i64 = arc.weights.iter().zip(d).map(|(w, x)| w * x).sum();
    let mut w = EchelonBasis::new();
    for (dg, gv) in omega {
        if arc.weights.iter().zip(dg).map(|(w, x)| w * x).sum::<i64>() <= a {
            w.insert(&normalized(gv, dg, arc));
        }
    }
    let rems: Vec<SparseVec<Vec<usize>>> = basis.iter().map(|u| w.reduce(&normalized(u, d, arc)).0).collect();
    if rems.iter().all(|r| r.is_empty()) {
        return basis;
    }
    kernel(&rems)
        .into_iter()
        .map(|x| {
            let mut v = SparseVec::new();
            for (xi, u) in x.iter().zip(&basis) {
                if !xi.is_zero() {
                    crate::poly::linalg::axpy(&mut v, xi, u);
                }
            }
            v
        })
        .collect()
}

struct Sweep<'a> {
    model: &'a Arc<Model>,
    pm: &'a ParamModel,
    q: usize,
    kind: SeedKind,
    omega_h: Vec<(Vec<i64>, SparseVec<Vec<usize>>)>,
    hg: Vec<(Vec<i64>, SparseVec<Vec<usize>>)>,
    arcs: Vec<ArcSpec>,
    out: SeedSet,
}

impl Sweep<'_> {
    fn holomorphic(&self, d: &[i64]) -> Vec<Vec<usize>> {
        if !self.pm.invariant(d) {
            return Vec::new();
        }
        self.pm.holomorphic_positions(d, self.q)
    }

    fn span(&self, d: &[i64]) -> EchelonBasis<Vec<usize>> {
        let mut eb = EchelonBasis::new();
        for (dg, v) in &self.hg {
            let diff: Vec<i64> = d.iter().zip(dg).map(|(a, b)| a - b).collect();
            if self.pm.semigroup(&diff).is_some() {
                eb.insert(v);
            }
        }
        eb
    }

    fn push(&mut self, d: &[i64], v: SparseVec<Vec<usize>>, origin: SeedOrigin) {
        let form = self.pm.from_vector(d, self.q, &v);
        self.out.gens.push(form);
        self.out.origins.push(origin);
        self.hg.push((d.to_vec(), v));
    }

    fn process(&mut self, d: &[i64]) -> Result<()> {
        let pos = self.holomorphic(d);
        if pos.is_empty() {
            return Ok(());
        }
        let mut m = self.span(d);
        if m.rank() == pos.len() {
            return Ok(());
        }
        let rank1 = self.q == 0 || self.q == self.pm.s;
        match (self.kind, rank1) {
            (SeedKind::L, _) => {
                for idx in &pos {
                    let u = unit(idx);
                    if m.insert(&u) {
                        self.push(d, u, SeedOrigin::Holomorphic(d.to_vec()));
                    }
                }
            }
            (SeedKind::Alpha, true) => {
                let degs: Vec<Vec<i64>> = self.omega_h.iter().map(|(dg, _)| dg.clone()).collect();
                let dec = decide_degree(self.pm, d, &degs)?;
                let inside = dec.inside;
                self.out.decisions.push(dec);
                if inside {
                    let u = unit(&pos[0]);
                    if m.insert(&u) {
                        self.push(d, u, SeedOrigin::Polyhedron(d.to_vec()));
                    }
                }
            }
            (SeedKind::Alpha, false) => {
                let mut upper: Vec<SparseVec<Vec<usize>>> = pos.iter().map(|idx| unit(idx)).collect();
                for arc in &self.arcs {
                    upper = cut_by_arc(upper, d, &self.omega_h, arc);
                    if upper.is_empty() {
                        break;
                    }
                }
                for u in upper {
                    if m.contains(&u) {
                        continue;
                    }
                    let form = self.pm.from_vector(d, self.q, &u);
                    match search_certificate(self.model, &form, CERT_DEGREE)? {
                        Some(cert) => {
                            m.insert(&u);
                            self.push(d, u, SeedOrigin::Certificate(d.to_vec(), Box::new(cert)));
                        }
                        None => {
                            return Err(Error::Undecided {
                                variety: self.pm.spec.id.clone(),
                                q: self.q,
                                degree: d.iter().map(|&x| x as u32).collect(),
                            })
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Seed generators of α^q (or L^q) for a variety with a monomial parametrization.
pub fn seed_sweep(model: &Arc<Model>, q: usize, kind: SeedKind) -> Result<SeedSet> {
    let pm = model.param().ok_or_else(|| Error::Unsupported(format!("{}: seed sweep needs a parametrization", model.spec().id)))?;
    if q > pm.s {
        return Err(Error::DegreeTooLarge { degree: q, dim: pm.s });
    }
    let omega = model.omega_gens(q)?;
    let mut omega_h = Vec::new();
    for g in &omega {
        let d = pm.is_homogeneous(g).ok_or_else(|| Error::Unsupported("inhomogeneous Ω generator".into()))?;
        omega_h.push((d, pm.vector(g)));
    }
    let rank1 = q == 0 || q == pm.s;
    let arcs = if kind == SeedKind::Alpha && !rank1 { stock_arcs(pm, ARC_WEIGHT, false) } else { Vec::new() };
    let mut bound: Vec<i64> = pm.e.clone();
    for (d, _) in &omega_h {
        for (b, x) in bound.iter_mut().zip(d) {
            *b = (*b).max(*x);
        }
    }
    let mut sw = Sweep {
        model,
        pm,
        q,
        kind,
        omega_h: omega_h.clone(),
        hg: omega_h.clone(),
        arcs,
        out: SeedSet {
            variety: pm.spec.id.clone(),
            q,
            kind,
            gens: omega.clone(),
            origins: (0..omega.len()).map(SeedOrigin::Omega).collect(),
            bound: Vec::new(),
            decisions: Vec::new(),
        },
    };
    let mut done: BTreeSet<Vec<i64>> = BTreeSet::new();
    for _ in 0..=MAX_DOUBLINGS {
        for d in boxed(&bound) {
            if done.insert(d.clone()) {
                sw.process(&d)?;
            }
        }
        let outer: Vec<i64> = bound.iter().zip(&pm.e).map(|(b, e)| b + e).collect();
        let mut bad = None;
        for d in boxed(&outer) {
            if d.iter().zip(&bound).all(|(x, b)| x <= b) {
                continue;
            }
            let pos = sw.holomorphic(&d);
            if !pos.is_empty() && sw.span(&d).rank() < pos.len() {
                bad = Some(d);
                break;
            }
        }
        match bad {
            None => {
                sw.out.bound = bound;
                return Ok(sw.out);
            }
            Some(d) => {
                if done.len() > 200_000 {
                    return Err(Error::Undecided { variety: pm.spec.id.clone(), q, degree: d.iter().map(|&x| x as u32).collect() });
                }
                bound = bound.iter().map(|b| 2 * b).collect();
            }
        }
    }
    Err(Error::Undecided { variety: pm.spec.id.clone(), q, degree: bound.iter().map(|&x| x as u32).collect() })
}
