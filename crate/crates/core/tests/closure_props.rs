//! Integral-closure checks: decision vs arcs vs a brute-force certificate search,
//! α ⊂ L, and certificate stability under the defining equation.

mod common;

use common::{brute_integral, Cover};
use proptest::prelude::*;
use singforms::beta::Engine;
use singforms::closure::{decide_monomial, load_certificate_template, refute_by_arc, stock_arcs, verify_certificate, VerdictTag};
use std::collections::BTreeMap;

fn covers() -> Vec<Cover> {
    let mut v = vec![Cover::Curve35];
    v.extend((2..=8).map(Cover::Sk));
    v
}

/// Every arc refutation agrees with the decision, and every "outside" decision
/// comes with an arc that refutes.
#[test]
fn decision_and_arcs_never_disagree() {
    let engine = Engine::default();
    for c in covers() {
        let model = engine.model(&c.id()).unwrap();
        let pm = model.param().unwrap();
        let arcs = stock_arcs(pm, 4, true);
        for (e, top) in c.queries() {
            let q = if top { c.dim() } else { 0 };
            let omega = c.monomial_form(&e, top);
            let dec = decide_monomial(&model, &omega).unwrap();
            let gens = model.omega_gens(q).unwrap();
            for arc in &arcs {
                let r = refute_by_arc(&model, &omega, &gens, arc).unwrap();
                if r.refuted {
                    assert!(!dec.inside, "{} {:?}: arc {} refutes a member", c.id(), e, arc.description);
                }
            }
            if !dec.inside {
                let arc = dec.arc.as_ref().expect("separating arc");
                assert!(refute_by_arc(&model, &omega, &gens, arc).unwrap().refuted, "{} {:?}", c.id(), e);
            }
        }
    }
}

/// Degree ≤ 2 monomial certificates imply membership; membership implies a
/// certificate of some degree ≤ 24 (S_k, k ≤ 8).
#[test]
fn decision_matches_bounded_certificate_search() {
    let engine = Engine::default();
    for k in 2..=8 {
        let c = Cover::Sk(k);
        let model = engine.model(&c.id()).unwrap();
        for (e, top) in c.queries() {
            let d = c.multidegree(&e, top);
            let gens = c.omega_degrees(if top { 2 } else { 0 });
            let dec = decide_monomial(&model, &c.monomial_form(&e, top)).unwrap();
            if brute_integral(c, &d, &gens, 2).is_some() {
                assert!(dec.inside, "S({}) {:?}", k, e);
            }
            assert_eq!(dec.inside, brute_integral(c, &d, &gens, 24).is_some(), "S({}) {:?}", k, e);
        }
    }
}

/// Anything certified in α has a holomorphic pullback, i.e. lies in L.
#[test]
fn alpha_verdicts_lie_in_l() {
    let engine = Engine::default();
    for c in covers() {
        let id = c.id();
        let model = engine.model(&id).unwrap();
        for (e, top) in c.queries() {
            let omega = c.monomial_form(&e, top);
            let v = engine.classify_alpha(&id, &omega, None).unwrap();
            if v.tag.in_alpha() == Some(true) {
                let q = omega.degree();
                let l = engine.l_seed(&id, q).unwrap().unwrap().module(&model).unwrap();
                assert!(l.contains(&omega).unwrap(), "{} {:?} in α but not in L", id, e);
                // pullback holomorphic: no negative exponents on the cover
                for f in omega.components().values() {
                    assert!(f.laurent_terms().keys().all(|x| x.iter().all(|&a| a >= 0)));
                }
            }
            assert_ne!(v.tag, VerdictTag::Unknown, "{} {:?}", id, e);
        }
    }
}

fn sk_cert(k: i64) -> singforms::closure::DependenceCertificate {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/certificates/sk-xdy.toml")).unwrap();
    let mut vars = BTreeMap::new();
    vars.insert("k".to_string(), k);
    vars.insert("m".to_string(), k / 2);
    load_certificate_template(&text, "sk-xdy.toml", &vars).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Adding r·(xy − z^k) to a coefficient of S_h keeps the certificate valid.
    #[test]
    fn certificate_stable_under_equation(k in 2i64..=6, which in 0usize..2, ex in 0u32..=2, ey in 0u32..=2, c in -3i64..=3) {
        prop_assume!(c != 0);
        let reg = singforms::variety::Registry::new();
        let mut cert = sk_cert(k);
        prop_assert!(verify_certificate(&reg, &cert).unwrap().valid);
        let t = which.min(cert.terms.len() - 1);
        let r = format!("{}*x^{}*y^{}", c, ex, ey);
        cert.terms[t].coeff = format!("{} + ({})*(x*y - z^{})", cert.terms[t].coeff, r, k);
        prop_assert!(verify_certificate(&reg, &cert).unwrap().valid);
        // while a genuine change of coefficient breaks it
        cert.terms[t].coeff = format!("{} + ({})", cert.terms[t].coeff, c);
        prop_assert!(!verify_certificate(&reg, &cert).unwrap().valid);
    }
}
