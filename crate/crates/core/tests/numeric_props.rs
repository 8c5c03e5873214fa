//! Pairing ∫ρ u∧v̄: multiplicity additivity, sesquilinearity, positivity, ε-behaviour.

use proptest::prelude::*;
use singforms::numeric::cases::{find, integrate_cases, stokes_cases};
use singforms::numeric::{eps_sequence, integrate, stokes_residual, CutoffSpec, CycleSpec, PatchSpec, QuadOptions, Smoothness};
use singforms::variety::Registry;

fn disc(mult: i64) -> CycleSpec {
    CycleSpec {
        variety: "affine(s)".into(),
        dim: 1,
        vars: vec!["s".into()],
        family: None,
        patches: vec![PatchSpec { components: vec!["s".into()], center: vec![], radius: 1.5, multiplicity: mult }],
    }
}

fn pair(reg: &Registry, cyc: &CycleSpec, u: &str, v: &str) -> num_complex::Complex64 {
    let m = reg.model("affine(s)").unwrap();
    let eps = eps_sequence(1e-1, 1e-3, 4);
    let r = integrate(reg, cyc, &CutoffSpec::bump(1.0, Smoothness::C1), &m.parse(u).unwrap(), &m.parse(v).unwrap(), &eps, QuadOptions::default(), None).unwrap();
    assert!(r.converged, "{} / {}", u, v);
    r.limit
}

fn close(a: num_complex::Complex64, b: num_complex::Complex64) -> bool {
    (a - b).norm() <= 1e-8 * (1.0 + a.norm().max(b.norm()))
}

fn poly_form() -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, 0u32..=3), 1..=3)
        .prop_map(|ts| format!("({})*ds", ts.iter().map(|(c, e)| format!("({})*s^{}", c, e)).collect::<Vec<_>>().join(" + ")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn multiplicity_is_additive(u in poly_form(), v in poly_form(), m in 1i64..=3) {
        let reg = Registry::new();
        let one = pair(&reg, &disc(1), &u, &v);
        let many = pair(&reg, &disc(m), &u, &v);
        prop_assert!(close(many, one * m as f64));
        let mut two = disc(1);
        two.patches.push(two.patches[0].clone());
        prop_assert!(close(pair(&reg, &two, &u, &v), one * 2.0));
    }

    #[test]
    fn pairing_is_sesquilinear(u1 in poly_form(), u2 in poly_form(), v in poly_form(), a in -4i64..=4) {
        let reg = Registry::new();
        let c = disc(1);
        let lhs = pair(&reg, &c, &format!("({})*{} + {}", a, u1, u2), &v);
        prop_assert!(close(lhs, pair(&reg, &c, &u1, &v) * a as f64 + pair(&reg, &c, &u2, &v)));
        prop_assert!(close(pair(&reg, &c, &v, &u1), pair(&reg, &c, &u1, &v).conj()));
    }

    #[test]
    fn diagonal_is_nonnegative(u in poly_form()) {
        let reg = Registry::new();
        let z = pair(&reg, &disc(1), &u, &u);
        prop_assert!(z.re >= -1e-12 && z.im.abs() < 1e-10, "{}", z);
    }

    #[test]
    fn stokes_holds_on_the_disc(f in prop::collection::vec((-3i64..=3, 0u32..=3), 1..=3), v in poly_form()) {
        let reg = Registry::new();
        let m = reg.model("affine(s)").unwrap();
        let u = f.iter().map(|(c, e)| format!("({})*s^{}", c, e)).collect::<Vec<_>>().join(" + ");
        let eps = eps_sequence(1e-1, 1e-3, 4);
        let (res, _) = stokes_residual(&reg, &disc(1), &CutoffSpec::bump(1.0, Smoothness::C1), &m.parse(&u).unwrap(), &m.parse(&v).unwrap(), &eps, QuadOptions::default()).unwrap();
        prop_assert!(res < 1e-6, "{} {} {}", u, v, res);
    }
}

#[test]
fn eps_tables_are_cauchy_and_monotone() {
    let reg = Registry::new();
    let eps = singforms::numeric::default_eps();
    for list in [integrate_cases(), stokes_cases()] {
        for case in &list {
            let m = reg.model(&case.cycle.variety).unwrap();
            let (u, v) = (m.parse(&case.u).unwrap(), m.parse(&case.v).unwrap());
            let r = if u.degree() == v.degree() {
                integrate(&reg, &case.cycle, &case.rho, &u, &v, &eps, QuadOptions::default(), None).unwrap()
            } else {
                stokes_residual(&reg, &case.cycle, &case.rho, &u, &v, &eps, QuadOptions::default()).unwrap().1
            };
            assert!(r.converged, "{}", case.name);
            assert!(r.monotone(), "{}: {:?}", case.name, r.increments());
            // geometric decay, and the limit within the tail bound Σ r^k·last
            let inc: Vec<f64> = r.increments().into_iter().filter(|x| *x > 1e-12 * (1.0 + r.limit.norm())).collect();
            if inc.len() >= 2 {
                let ratio = inc.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                assert!(ratio < 0.9, "{}: {:?}", case.name, inc);
                let tail = inc.last().unwrap() * ratio / (1.0 - ratio);
                let gap = (r.limit - r.values.last().unwrap()).norm();
                assert!(gap <= 2.0 * tail + 1e-9, "{}: gap {} tail {}", case.name, gap, tail);
            }
        }
    }
    assert!(find(&integrate_cases(), "curve35").is_some());
}
