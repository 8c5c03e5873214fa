//! Level tower: monotone, β closed under ∧ and d, p* bounds, ladder order.

use proptest::prelude::*;
use singforms::beta::{classify, Engine, Rung};
use std::sync::OnceLock;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(Engine::default)
}

const VARIETIES: &[&str] = &["curve35", "S(2)", "S(3)", "S(4)", "S(6)", "M(2)", "M(3)", "Fermat(3)", "Fermat(4)", "affine(s)"];

#[test]
fn levels_are_nested() {
    for id in VARIETIES {
        let model = engine().model(id).unwrap();
        let tower = engine().tower(id, None).unwrap();
        for p in 0..tower.levels.len() - 1 {
            for q in 0..=model.dim() {
                let next = tower.levels[p + 1][q].module(&model).unwrap();
                for g in &tower.levels[p][q].gens {
                    assert!(next.contains(g).unwrap(), "{} q={} p={}: {}", id, q, p, model.print(g));
                }
                if !tower.changed[p + 1][q] {
                    assert!(next.equals(&tower.levels[p][q].module(&model).unwrap()).unwrap());
                }
            }
        }
    }
}

#[test]
fn beta_closed_under_wedge_and_d() {
    for id in ["curve35", "S(2)", "S(3)", "S(4)", "S(5)", "M(2)", "Fermat(4)"] {
        let model = engine().model(id).unwrap();
        let n = model.dim();
        let beta: Vec<_> = (0..=n).map(|q| engine().beta(id, q, None).unwrap().beta).collect();
        let mods: Vec<_> = beta.iter().map(|b| b.module(&model).unwrap()).collect();
        for q in 0..n {
            for g in &beta[q].gens {
                let dg = model.d(g).unwrap();
                assert!(mods[q + 1].contains(&dg).unwrap(), "{}: d({}) ∉ β", id, model.print(g));
            }
        }
        for q in 0..=n {
            for r in 0..=n - q {
                for a in &beta[q].gens {
                    for b in &beta[r].gens {
                        let w = model.wedge(a, b).unwrap();
                        assert!(mods[q + r].contains(&w).unwrap(), "{}: {} ∧ {} ∉ β", id, model.print(a), model.print(b));
                    }
                }
            }
        }
    }
}

#[test]
fn p_star_bounds() {
    for id in VARIETIES.iter().copied().chain(["S(8)", "M(5)", "Fermat(6)"]) {
        let model = engine().model(id).unwrap();
        for q in 0..=model.dim() {
            let b = engine().beta(id, q, None).unwrap();
            assert!(b.p_star <= q, "{} q={} p*={}", id, q, b.p_star);
            if model.spec().normal && q >= 1 {
                assert!(b.p_star < q, "{} q={} p*={}", id, q, b.p_star);
            }
        }
    }
}

fn monomial_form(k: i64) -> impl Strategy<Value = String> {
    let top = (0u32..=2 * k as u32, 0u32..=2 * k as u32, 0u32..=k as u32 + 1)
        .prop_map(|(i, j, e)| format!("x^{}*y^{}*dx^dy/z^{}", i, j, e));
    let one = (0u32..=2, 0usize..3, 0usize..3, 0u32..=k as u32)
        .prop_map(|(i, a, b, e)| {
            let v = ["x", "y", "z"];
            format!("{}^{}*d{}/z^{}", v[a], i, v[b], e)
        });
    prop_oneof![top, one]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ladder_is_ordered((k, text) in (2i64..=5).prop_flat_map(|k| (Just(k), monomial_form(k)))) {
        let id = format!("S({})", k);
        let model = engine().model(&id).unwrap();
        let omega = model.parse(&text).unwrap();
        let rep = classify(engine(), &id, &omega, None, None).unwrap();
        let order = [Rung::Omega, Rung::Alpha, Rung::AlphaLevel, Rung::Beta, Rung::L];
        for w in order.windows(2) {
            if rep.answer(w[0]) == Some(true) {
                prop_assert_ne!(rep.answer(w[1]), Some(false), "{} on {}: {:?} but not {:?}", text, id, w[0], w[1]);
            }
            if rep.answer(w[1]) == Some(false) {
                prop_assert_ne!(rep.answer(w[0]), Some(true));
            }
        }
        if let Some(p) = rep.level {
            let m = engine().alpha_level(&id, omega.degree(), p).unwrap().module(&model).unwrap();
            prop_assert!(m.contains(&omega).unwrap());
        }
    }
}
