//! Property tests for the polynomial layer.

use num_traits::Zero;
use proptest::prelude::*;
use singforms::poly::{groebner_basis, module_membership, normal_form, rat, MonomialOrder, Polynomial, Rational};
use std::collections::BTreeMap;

fn poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), -5i64..=5), 0..=max_terms)
        .prop_map(move |ts| Polynomial::from_terms(nvars, ts.into_iter().map(|(e, c)| (e, rat(c)))))
}

/// Homogeneous polynomial of the given degree in two variables.
fn homog2(deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-3i64..=3, (deg + 1) as usize)
        .prop_map(move |cs| Polynomial::from_terms(2, cs.into_iter().enumerate().map(|(i, c)| (vec![i as u32, deg - i as u32], rat(c)))))
}

fn monomials2(deg: u32) -> Vec<Vec<u32>> {
    (0..=deg).map(|i| vec![i, deg - i]).collect()
}

/// Gaussian elimination: is `target` in the span of `rows`?
fn in_span(rows: &[BTreeMap<(usize, Vec<u32>), Rational>], target: &BTreeMap<(usize, Vec<u32>), Rational>) -> bool {
    let mut basis: Vec<BTreeMap<(usize, Vec<u32>), Rational>> = Vec::new();
    let reduce = |basis: &Vec<BTreeMap<(usize, Vec<u32>), Rational>>, v: &BTreeMap<(usize, Vec<u32>), Rational>| {
        let mut v = v.clone();
        for b in basis {
            let (pk, pv) = b.iter().next_back().unwrap();
            if let Some(c) = v.get(pk).cloned() {
                let f = c / pv;
                for (k, x) in b {
                    let e = v.entry(k.clone()).or_insert_with(Rational::zero);
                    *e -= &f * x;
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        v
    };
    for r in rows {
        let v = reduce(&basis, r);
        if !v.is_empty() {
            basis.push(v);
            // keep pivots distinct by re-reducing earlier rows lazily: sort by pivot
            basis.sort_by(|a, b| b.keys().next_back().cmp(&a.keys().next_back()));
            let mut clean: Vec<BTreeMap<(usize, Vec<u32>), Rational>> = Vec::new();
            for b in basis.drain(..) {
                let r = reduce(&clean, &b);
                if !r.is_empty() {
                    clean.push(r);
                    clean.sort_by(|a, b| b.keys().next_back().cmp(&a.keys().next_back()));
                }
            }
            basis = clean;
        }
    }
    reduce(&basis, target).is_empty()
}

fn flatten(v: &[Polynomial]) -> BTreeMap<(usize, Vec<u32>), Rational> {
    let mut m = BTreeMap::new();
    for (i, p) in v.iter().enumerate() {
        for (e, c) in p.terms() {
            m.insert((i, e.clone()), c.clone());
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(3, 3, 4), b in poly(3, 3, 4), c in poly(3, 3, 4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiples_reduce_to_zero(p in poly(3, 2, 3), g1 in poly(3, 2, 3), g2 in poly(3, 2, 3)) {
        prop_assume!(!g1.is_zero());
        for order in [MonomialOrder::DegRevLex, MonomialOrder::Lex] {
            let gb = groebner_basis(&[g1.clone(), g2.clone()], order);
            prop_assert!(normal_form(&(&p * &g1), &gb, order).is_zero());
            if !g2.is_zero() {
                prop_assert!(normal_form(&(&(&p * &g1) + &g2), &gb, order).is_zero());
            }
        }
    }

    #[test]
    fn groebner_ignores_generator_order(g in prop::collection::vec(poly(3, 2, 3), 1..4)) {
        let a = groebner_basis(&g, MonomialOrder::DegRevLex);
        let mut r = g.clone();
        r.reverse();
        let b = groebner_basis(&r, MonomialOrder::DegRevLex);
        prop_assert_eq!(a, b);
        let mut s = g.clone();
        s.rotate_left(1);
        prop_assert_eq!(groebner_basis(&s, MonomialOrder::DegRevLex), groebner_basis(&g, MonomialOrder::DegRevLex));
    }

    /// Graded membership in Q[x,y]^2 against linear algebra on the degree-D slice.
    #[test]
    fn module_membership_matches_linear_algebra(
        gdeg in prop::collection::vec(1u32..=2, 1..=3),
        seed in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 3),
        target in (homog2(4), homog2(4)),
        member in any::<bool>(),
        coeffs in prop::collection::vec(homog2(2), 3),
    ) {
        let d: u32 = 4;
        // generators: homogeneous of degree gdeg[i] in both positions
        let gens: Vec<Vec<Polynomial>> = gdeg.iter().enumerate().map(|(i, &g)| {
            let s = &seed[i];
            let mk = |off: usize| Polynomial::from_terms(2, monomials2(g).into_iter().enumerate().map(|(j, e)| (e, rat(s[(off + j) % 6]))));
            vec![mk(0), mk(3)]
        }).collect();
        let elt: Vec<Polynomial> = if member {
            // Σ c_i m_i g_i with c_i homogeneous of degree d - deg g_i
            let mut e = vec![Polynomial::zero(2), Polynomial::zero(2)];
            for (i, g) in gens.iter().enumerate() {
                let shift = d - gdeg[i];
                let c = Polynomial::from_terms(2, coeffs[i].terms().iter().map(|(ex, c)| (vec![ex[0], ex[1]], c.clone())));
                let c = if shift == 2 { c } else { &c * &Polynomial::var(2, 0).pow(shift - 2) };
                e[0] = &e[0] + &(&c * &g[0]);
                e[1] = &e[1] + &(&c * &g[1]);
            }
            e
        } else {
            vec![target.0.clone(), target.1.clone()]
        };
        let mut rows = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            for m in monomials2(d - gdeg[i]) {
                let mp = Polynomial::monomial(2, m, rat(1));
                rows.push(flatten(&[&mp * &g[0], &mp * &g[1]]));
            }
        }
        let oracle = in_span(&rows, &flatten(&elt));
        let got = module_membership(&elt, &gens, 2);
        prop_assert_eq!(got.is_some(), oracle);
        if let Some(w) = got {
            // the witness reproduces the element
            let mut e = vec![Polynomial::zero(2), Polynomial::zero(2)];
            for (c, g) in w.iter().zip(&gens) {
                e[0] = &e[0] + &(c * &g[0]);
                e[1] = &e[1] + &(c * &g[1]);
            }
            prop_assert_eq!(e, elt);
        }
    }
}
