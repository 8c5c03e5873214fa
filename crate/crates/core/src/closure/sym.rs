//! Symmetric algebra of the generic free module: a degree-q form Σ g_J dx_J becomes
//! the linear polynomial Σ g_J T_J, and symmetric products multiply coefficients.

use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::mero::MeroFunction;
use crate::variety::Model;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct SymElem {
    /// T-exponent vector (one entry per position) to coefficient.
    pub terms: BTreeMap<Vec<u32>, MeroFunction>,
    npos: usize,
    nvars: usize,
}

impl SymElem {
    pub fn one(npos: usize, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; npos], MeroFunction::constant(nvars, num_traits::One::one()));
        SymElem { terms, npos, nvars }
    }

    pub fn zero(npos: usize, nvars: usize) -> Self {
        SymElem { terms: BTreeMap::new(), npos, nvars }
    }

    pub fn from_form(model: &Model, u: &DiffForm) -> Result<Self> {
        let pos = model.positions(u.degree());
        let mut terms = BTreeMap::new();
        for (idx, f) in u.components() {
            let i = pos
                .iter()
                .position(|p| p == idx)
                .ok_or_else(|| Error::CoordMismatch(format!("component {:?} is not a working position", idx)))?;
            let mut e = vec![0; pos.len()];
            e[i] = 1;
            terms.insert(e, f.clone());
        }
        Ok(SymElem { terms, npos: pos.len(), nvars: u.nvars() })
    }

    pub fn scalar(f: MeroFunction, npos: usize) -> Self {
        let nvars = f.nvars();
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(vec![0; npos], f);
        }
        SymElem { terms, npos, nvars }
    }

    pub fn add(&self, o: &SymElem, model: &Model) -> SymElem {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let v = match terms.get(e) {
                Some(a) => model.reduce_fn(&(a + c)),
                None => c.clone(),
            };
            if v.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), v);
            }
        }
        SymElem { terms, npos: self.npos, nvars: self.nvars }
    }

    pub fn mul(&self, o: &SymElem, model: &Model) -> SymElem {
        let mut out = SymElem::zero(self.npos, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = model.reduce_fn(&(c1 * c2));
                let mut single = BTreeMap::new();
                single.insert(e, c);
                out = out.add(&SymElem { terms: single, npos: self.npos, nvars: self.nvars }, model);
            }
        }
        out
    }

    pub fn pow(&self, k: usize, model: &Model) -> SymElem {
        let mut acc = SymElem::one(self.npos, self.nvars);
        for _ in 0..k {
            acc = acc.mul(self, model);
        }
        acc
    }

    pub fn is_zero(&self, model: &Model) -> bool {
        self.terms.values().all(|c| model.reduce_fn(c).is_zero())
    }
}
