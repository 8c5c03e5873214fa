//! Exterior algebra of meromorphic forms.

mod map;

pub use map::{MapSpec, MapWitness};

use crate::error::{Error, Result};
use crate::mero::MeroFunction;
use crate::poly::{rat, Polynomial, Rational};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    Ambient,
    Parameter,
}

/// Sign of merging two increasing index lists, or None if they overlap.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut inversions = 0usize;
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, out))
}

/// Sign that sorts an arbitrary index list, or None on repetition.
pub fn sort_sign(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// A degree-q form Σ f_I dx_I over an n-dimensional coordinate space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffForm {
    degree: usize,
    coords: Coords,
    nvars: usize,
    comps: BTreeMap<Vec<usize>, MeroFunction>,
}

impl DiffForm {
    pub fn zero(nvars: usize, degree: usize, coords: Coords) -> Self {
        DiffForm { degree, coords, nvars, comps: BTreeMap::new() }
    }

    pub fn function(f: MeroFunction, coords: Coords) -> Self {
        let nvars = f.nvars();
        let mut d = DiffForm::zero(nvars, 0, coords);
        if !f.is_zero() {
            d.comps.insert(vec![], f);
        }
        d
    }

    pub fn poly(p: Polynomial, coords: Coords) -> Self {
        Self::function(MeroFunction::from_poly(p), coords)
    }

    pub fn one(nvars: usize, coords: Coords) -> Self {
        Self::poly(Polynomial::one(nvars), coords)
    }

    /// dx_i
    pub fn differential(nvars: usize, i: usize, coords: Coords) -> Self {
        let mut d = DiffForm::zero(nvars, 1, coords);
        d.comps.insert(vec![i], MeroFunction::constant(nvars, Rational::one()));
        d
    }

    /// f dx_I for an arbitrary (unsorted) index list.
    pub fn term(f: MeroFunction, idx: &[usize], coords: Coords) -> Self {
        let nvars = f.nvars();
        let mut d = DiffForm::zero(nvars, idx.len(), coords);
        if let Some((s, sorted)) = sort_sign(idx) {
            if !f.is_zero() {
                d.comps.insert(sorted, f.scale(&rat(s)));
            }
        }
        d
    }

    pub fn from_components(nvars: usize, degree: usize, coords: Coords, comps: BTreeMap<Vec<usize>, MeroFunction>) -> Self {
        let comps = comps.into_iter().filter(|(_, f)| !f.is_zero()).collect();
        DiffForm { degree, coords, nvars, comps }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, MeroFunction> {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> MeroFunction {
        self.comps.get(idx).cloned().unwrap_or_else(|| MeroFunction::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.comps.values().all(|f| f.is_polynomial())
    }

    pub fn with_coords(mut self, coords: Coords) -> Self {
        self.coords = coords;
        self
    }

    fn check(&self, o: &DiffForm) -> Result<()> {
        if self.coords != o.coords || self.nvars != o.nvars {
            return Err(Error::CoordMismatch(format!(
                "{:?}/{} vs {:?}/{}",
                self.coords, self.nvars, o.coords, o.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &DiffForm) -> Result<DiffForm> {
        self.check(o)?;
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(Error::CoordMismatch(format!("adding degrees {} and {}", self.degree, o.degree)));
        }
        let degree = if self.is_zero() { o.degree } else { self.degree };
        let mut comps = self.comps.clone();
        for (k, f) in &o.comps {
            let v = match comps.get(k) {
                Some(g) => g + f,
                None => f.clone(),
            };
            if v.is_zero() {
                comps.remove(k);
            } else {
                comps.insert(k.clone(), v);
            }
        }
        Ok(DiffForm { degree, coords: self.coords, nvars: self.nvars, comps })
    }

    pub fn sub(&self, o: &DiffForm) -> Result<DiffForm> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, c: &Rational) -> DiffForm {
        self.mul_fn(&MeroFunction::constant(self.nvars, c.clone()))
    }

    pub fn mul_fn(&self, f: &MeroFunction) -> DiffForm {
        let comps = self
            .comps
            .iter()
            .map(|(k, g)| (k.clone(), g * f))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        DiffForm { degree: self.degree, coords: self.coords, nvars: self.nvars, comps }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> DiffForm {
        self.mul_fn(&MeroFunction::from_poly(p.clone()))
    }

    pub fn wedge(&self, o: &DiffForm) -> Result<DiffForm> {
        self.check(o)?;
        let degree = self.degree + o.degree;
        if degree > self.nvars {
            return Err(Error::DegreeTooLarge { degree, dim: self.nvars });
        }
        let mut comps: BTreeMap<Vec<usize>, MeroFunction> = BTreeMap::new();
        for (i, f) in &self.comps {
            for (j, g) in &o.comps {
                if let Some((s, k)) = merge_sign(i, j) {
                    let t = (f * g).scale(&rat(s));
                    let v = match comps.get(&k) {
                        Some(x) => x + &t,
                        None => t,
                    };
                    comps.insert(k, v);
                }
            }
        }
        comps.retain(|_, f| !f.is_zero());
        Ok(DiffForm { degree, coords: self.coords, nvars: self.nvars, comps })
    }

    /// Exterior derivative.
    pub fn d(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.nvars, self.degree + 1, self.coords);
        for (idx, f) in &self.comps {
            for j in 0..self.nvars {
                if idx.contains(&j) {
                    continue;
                }
                let df = f.derivative(j);
                if df.is_zero() {
                    continue;
                }
                let (s, k) = merge_sign(&[j], idx).unwrap();
                let t = df.scale(&rat(s));
                let v = match out.comps.get(&k) {
                    Some(x) => x + &t,
                    None => t,
                };
                if v.is_zero() {
                    out.comps.remove(&k);
                } else {
                    out.comps.insert(k, v);
                }
            }
        }
        out
    }

    /// Substitute x = φ(s); `active[j]` false marks source variables held constant (no ds_j).
    pub fn substitute(&self, phi: &[Polynomial], src_nvars: usize, src_coords: Coords, active: Option<&[bool]>) -> Result<DiffForm> {
        assert_eq!(phi.len(), self.nvars, "map arity mismatch");
        let nactive = active.map(|a| a.iter().filter(|&&b| b).count()).unwrap_or(src_nvars);
        if self.degree > nactive {
            return Ok(DiffForm::zero(src_nvars, self.degree, src_coords));
        }
        let dphi: Vec<DiffForm> = phi
            .iter()
            .map(|p| {
                let mut comps = BTreeMap::new();
                for j in 0..src_nvars {
                    if active.map(|a| a[j]).unwrap_or(true) {
                        let dp = p.derivative(j);
                        if !dp.is_zero() {
                            comps.insert(vec![j], MeroFunction::from_poly(dp));
                        }
                    }
                }
                DiffForm { degree: 1, coords: src_coords, nvars: src_nvars, comps }
            })
            .collect();
        let mut out = DiffForm::zero(src_nvars, self.degree, src_coords);
        for (idx, f) in &self.comps {
            let g = f.compose(phi)?;
            let mut t = DiffForm::function(g, src_coords);
            for &i in idx {
                t = t.wedge(&dphi[i])?;
                if t.is_zero() {
                    break;
                }
            }
            if !t.is_zero() {
                t.degree = self.degree;
                out = out.add(&t)?;
            }
        }
        out.degree = self.degree;
        Ok(out)
    }

    /// Re-embed into a larger coordinate space; `map[i]` is the new index of coordinate i (map must be increasing).
    pub fn remap(&self, nvars: usize, map: &[usize]) -> DiffForm {
        let comps = self
            .comps
            .iter()
            .map(|(k, f)| (k.iter().map(|&i| map[i]).collect(), f.remap(nvars, map)))
            .collect();
        DiffForm { degree: self.degree, coords: self.coords, nvars, comps }
    }

    /// Apply a map to every coefficient.
    pub fn map_coeffs<F: Fn(&MeroFunction) -> MeroFunction>(&self, f: F) -> DiffForm {
        let comps = self
            .comps
            .iter()
            .map(|(k, g)| (k.clone(), f(g)))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        DiffForm { degree: self.degree, coords: self.coords, nvars: self.nvars, comps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(n: usize, i: usize) -> DiffForm {
        DiffForm::differential(n, i, Coords::Ambient)
    }

    #[test]
    fn dx_wedge_dx_vanishes() {
        assert!(dx(3, 0).wedge(&dx(3, 0)).unwrap().is_zero());
        let a = dx(3, 0).wedge(&dx(3, 1)).unwrap();
        let b = dx(3, 1).wedge(&dx(3, 0)).unwrap();
        assert_eq!(a, b.neg());
    }

    #[test]
    fn d_of_constant_differential_is_zero() {
        assert!(dx(2, 0).scale(&rat(7)).d().is_zero());
    }

    #[test]
    fn merge_sign_counts_inversions() {
        assert_eq!(merge_sign(&[1], &[0]), Some((-1, vec![0, 1])));
        assert_eq!(merge_sign(&[0, 2], &[1]), Some((-1, vec![0, 1, 2])));
        assert_eq!(merge_sign(&[0], &[0]), None);
        assert_eq!(sort_sign(&[2, 0, 1]), Some((1, vec![0, 1, 2])));
    }

    #[test]
    fn coordinate_mismatch_is_an_error() {
        let a = DiffForm::differential(2, 0, Coords::Ambient);
        let b = DiffForm::differential(2, 1, Coords::Parameter);
        assert!(matches!(a.wedge(&b), Err(Error::CoordMismatch(_))));
    }
}
