//! Ideal Gröbner bases (rank-one modules).

use super::module::ModuleBasis;
use super::{MonomialOrder, Polynomial};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Reduced Gröbner basis, monic, sorted by leading monomial ascending.
pub fn groebner_basis(gens: &[Polynomial], order: MonomialOrder) -> Vec<Polynomial> {
    let gens: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    if gens.is_empty() {
        return Vec::new();
    }
    let nvars = gens[0].nvars();
    let vecs: Vec<Vec<Polynomial>> = gens.iter().map(|g| vec![(*g).clone()]).collect();
    let mb = ModuleBasis::new(&vecs, 1, nvars, order, false);
    mb.basis().into_iter().map(|mut v| v.remove(0)).collect()
}

/// Remainder of full division by `basis` (assumed a Gröbner basis for `order`).
pub fn normal_form(p: &Polynomial, basis: &[Polynomial], order: MonomialOrder) -> Polynomial {
    if basis.is_empty() {
        return p.clone();
    }
    let mut cur = p.clone();
    let mut rem = Polynomial::zero(p.nvars());
    let leads: Vec<(Vec<u32>, super::Rational)> = basis
        .iter()
        .map(|g| {
            let (e, c) = g.leading(order).expect("zero in basis");
            (e.clone(), c.clone())
        })
        .collect();
    while let Some((e, c)) = cur.leading(order).map(|(e, c)| (e.clone(), c.clone())) {
        match leads.iter().position(|(m, _)| super::divides(m, &e)) {
            Some(k) => {
                let q = &c / &leads[k].1;
                let m = super::mono_div(&e, &leads[k].0);
                cur = &cur - &basis[k].mul_term(&m, &q);
            }
            None => {
                let t = Polynomial::monomial(p.nvars(), e.clone(), c.clone());
                cur = &cur - &t;
                rem = &rem + &t;
            }
        }
    }
    rem
}

/// Generators of an ideal with a lazily filled, shared Gröbner cache.
#[derive(Debug, Default)]
pub struct IdealPresentation {
    generators: Vec<Polynomial>,
    cache: Mutex<BTreeMap<MonomialOrder, Arc<Vec<Polynomial>>>>,
}

impl Clone for IdealPresentation {
    fn clone(&self) -> Self {
        IdealPresentation {
            generators: self.generators.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl PartialEq for IdealPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl IdealPresentation {
    pub fn new(generators: Vec<Polynomial>) -> Self {
        IdealPresentation { generators, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn basis(&self, order: MonomialOrder) -> Arc<Vec<Polynomial>> {
        let mut c = self.cache.lock().unwrap();
        c.entry(order).or_insert_with(|| Arc::new(groebner_basis(&self.generators, order))).clone()
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let b = self.basis(MonomialOrder::DegRevLex);
        normal_form(p, &b, MonomialOrder::DegRevLex)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(nv: usize, ts: &[(&[u32], i64)]) -> Polynomial {
        Polynomial::from_terms(nv, ts.iter().map(|(e, c)| (e.to_vec(), rat(*c))))
    }

    #[test]
    fn single_generator_is_its_own_basis() {
        let f = p(2, &[(&[3, 0], 1), (&[0, 5], -1)]);
        let gb = groebner_basis(&[f.clone()], MonomialOrder::DegRevLex);
        assert_eq!(gb.len(), 1);
        // monic up to sign: leading term is -y^5 in degrevlex
        assert_eq!(gb[0], f.make_monic(MonomialOrder::DegRevLex));
    }

    #[test]
    fn division_remainder() {
        let f = p(2, &[(&[3, 0], 1), (&[0, 5], -1)]);
        let gb = groebner_basis(&[f.clone()], MonomialOrder::DegRevLex);
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let q = &(&x * &f) + &y;
        assert_eq!(normal_form(&q, &gb, MonomialOrder::DegRevLex), y);
    }

    #[test]
    fn cache_reduces_generators_to_zero() {
        let ideal = IdealPresentation::new(vec![p(2, &[(&[2, 0], 1), (&[0, 1], -1)]), p(2, &[(&[0, 2], 1), (&[1, 0], -1)])]);
        for g in ideal.generators().to_vec() {
            assert!(ideal.contains(&g));
        }
    }
}
