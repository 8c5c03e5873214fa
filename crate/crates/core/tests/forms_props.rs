//! Property tests for forms: d² = 0, Leibniz, pullback compatibility, deck invariance,
//! printer/parser round trip.

use proptest::prelude::*;
use singforms::forms::{Coords, DiffForm};
use singforms::mero::MeroFunction;
use singforms::parse::{parse_form, print_form, VarContext};
use singforms::poly::{rat, Polynomial};
use singforms::variety::{ParamModel, Registry};

/// Random form of degree q in n ambient variables: up to 3 terms c·x^e/x_pole^k dx_I.
fn form(n: usize, q: usize, pole: Option<usize>) -> impl Strategy<Value = DiffForm> {
    let term = (prop::collection::vec(0u32..=3, n), -4i64..=4, 0u32..=2, prop::sample::subsequence((0..n).collect::<Vec<_>>(), q));
    prop::collection::vec(term, 1..=3).prop_map(move |ts| {
        let mut u = DiffForm::zero(n, q, Coords::Ambient);
        for (e, c, k, idx) in ts {
            let mut den = vec![0u32; n];
            if let Some(p) = pole {
                den[p] = k;
            }
            let f = MeroFunction::new(Polynomial::monomial(n, e, rat(c)), den);
            u = u.add(&DiffForm::term(f, &idx, Coords::Ambient)).unwrap();
        }
        u
    })
}

fn sign(q: usize) -> i64 {
    if q % 2 == 0 {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(u in (0usize..=2).prop_flat_map(|q| form(4, q, Some(2)))) {
        prop_assert!(u.d().d().is_zero());
    }

    #[test]
    fn leibniz(u in form(4, 1, Some(3)), v in form(4, 2, Some(3)), f in form(4, 0, None)) {
        for (a, b) in [(&u, &v), (&f, &u), (&v, &u)] {
            let lhs = a.wedge(b).unwrap().d();
            let rhs = a.d().wedge(b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(&rat(sign(a.degree())))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pullback_respects_wedge_and_d(k in 2i64..=6, u in form(3, 1, Some(2)), v in form(3, 1, Some(2))) {
        let reg = Registry::new();
        let m = reg.map(&format!("q({})", k)).unwrap();
        let pb = |w: &DiffForm| reg.pullback(&m, w).unwrap();
        prop_assert_eq!(pb(&u.wedge(&v).unwrap()), pb(&u).wedge(&pb(&v)).unwrap());
        prop_assert_eq!(pb(&u.d()), pb(&u).d());
    }

    #[test]
    fn pullback_is_functorial(k in 2i64..=5, u in form(4, 1, Some(2)), w in form(4, 2, Some(2))) {
        let reg = Registry::new();
        let outer = reg.map(&format!("slice({})", k)).unwrap();
        let inner = reg.map(&format!("q({})", k)).unwrap();
        let comp = reg.map(&format!("compose(slice({}),q({}))", k, k)).unwrap();
        for x in [&u, &w] {
            let direct = reg.pullback(&comp, x).unwrap();
            let staged = reg.pullback(&inner, &reg.pullback(&outer, x).unwrap()).unwrap();
            prop_assert_eq!(direct, staged);
        }
    }

    #[test]
    fn print_parse_round_trip(u in form(3, 2, Some(2)), f in form(3, 0, Some(2)), w in form(3, 1, Some(2))) {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let ctx = VarContext::new(names.clone(), Coords::Ambient, vec![true; 3]);
        // "0" carries no degree, so zero forms are skipped
        for x in [&u, &f, &w].into_iter().filter(|x| !x.is_zero()) {
            let text = print_form(x, &names);
            let back = parse_form(&text, &ctx).unwrap();
            prop_assert_eq!(&back, x, "{}", text);
            prop_assert_eq!(print_form(&back, &names), text);
        }
    }
}

/// The Ω generators on the cover of S_k are fixed by (a, b) ↦ (ζa, ζ^{-1}b).
#[test]
fn omega_generators_are_deck_invariant() {
    let reg = Registry::new();
    for k in 2..=8 {
        let m = reg.model(&format!("S({})", k)).unwrap();
        let spec = m.spec();
        let deck = spec.deck.as_ref().unwrap();
        for q in 0..=2 {
            for g in m.omega_gens(q).unwrap() {
                assert_eq!(g.coords(), Coords::Parameter);
                for (idx, f) in g.components() {
                    for e in f.laurent_terms().keys() {
                        let d = ParamModel::multidegree(e, idx);
                        assert_eq!(deck.character(&d), 0, "S({}) q={} generator {}", k, q, m.print(&g));
                    }
                }
            }
        }
    }
}

#[test]
fn antisymmetry_in_parser() {
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let ctx = VarContext::new(names, Coords::Ambient, vec![false, false, true]);
    let a = parse_form("dx^dy - dy^dx", &ctx).unwrap();
    let b = parse_form("2*dx^dy", &ctx).unwrap();
    assert_eq!(a, b);
}
