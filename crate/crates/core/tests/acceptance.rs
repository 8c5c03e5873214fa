//! One line per acceptance criterion. Run with `cargo test -p singforms --test acceptance`.

mod common;

use common::{brute_integral, Cover};
use singforms::beta::Engine;
use singforms::closure::decide_monomial;
use singforms::forms::DiffForm;
use singforms::numeric::cases::{find, integrate_cases, s4_family, stokes_cases};
use singforms::numeric::{default_eps, family_scan, integrate, stokes_residual, QuadOptions};
use singforms::suite::{self, Row};
use singforms::variety::{builtin, OModule};
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn span(engine: &Engine, id: &str, q: usize, extra: &[DiffForm]) -> Result<OModule, String> {
    let model = e(engine.model(id))?;
    let mut gens = e(model.omega_gens(q))?;
    gens.extend(extra.iter().cloned());
    e(OModule::new(model, q, gens))
}

fn parse(engine: &Engine, id: &str, text: &str) -> Result<DiffForm, String> {
    e(e(engine.model(id))?.parse(text))
}

fn same(a: &OModule, b: &OModule, what: &str) -> Result<(), String> {
    ensure(e(a.equals(b))?, format!("{} differs", what))
}

fn rows(engine: &Engine, scope: &str) -> Result<usize, String> {
    let rows: Vec<Row> = e(suite::run(engine, &suite::fixture_dir(), scope))?;
    let bad: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| format!("{} (got {})", r.id, r.computed)).collect();
    ensure(bad.is_empty(), bad.join("; "))?;
    Ok(rows.len())
}

fn criterion1(engine: &Engine) -> Check {
    let c = Cover::Curve35;
    let model = e(engine.model("curve35"))?;
    let alpha0 = e(e(engine.alpha_seed("curve35", 0))?.module(&model))?;
    let o_span: Vec<DiffForm> = [0, 1, 2, 4, 7].iter().map(|&j| c.monomial_form(&[j], false)).collect();
    same(&alpha0, &e(OModule::new(model.clone(), 0, o_span))?, "α⁰")?;
    let alpha1 = e(e(engine.alpha_seed("curve35", 1))?.module(&model))?;
    same(&alpha1, &span(engine, "curve35", 1, &[parse(engine, "curve35", "y^2*dy/x")?])?, "α¹")?;
    let b = e(engine.beta("curve35", 1, None))?;
    ensure(b.p_star == 1, format!("p* = {}", b.p_star))?;
    // holomorphic pullbacks: t^j dt for j ≥ 0, generated over ⟨3,5⟩ by the gaps and dt
    let l1: Vec<DiffForm> = [0, 1, 2, 4, 7].iter().map(|&j| c.monomial_form(&[j], true)).collect();
    same(&e(b.beta.module(&model))?, &e(OModule::new(model, 1, l1))?, "β¹ vs L¹")?;
    Ok("α⁰, α¹, β¹ = L¹ with p* = 1".into())
}

fn criterion2(engine: &Engine) -> Check {
    for k in 2..=8i64 {
        let id = format!("S({})", k);
        let m = k / 2;
        let model = e(engine.model(&id))?;
        let f = |t: String| parse(engine, &id, &t);
        let a1 = e(e(engine.alpha_seed(&id, 1))?.module(&model))?;
        same(&a1, &span(engine, &id, 1, &[f(format!("x*dy/z^{}", m))?])?, &format!("{} α¹", id))?;
        let a2 = e(e(engine.alpha_seed(&id, 2))?.module(&model))?;
        same(&a2, &span(engine, &id, 2, &[f(format!("dx^dy/z^{}", m - 1))?])?, &format!("{} α²", id))?;
        let b2 = span(engine, &id, 2, &[f(format!("dx^dy/z^{}", m))?])?;
        same(&e(e(engine.alpha_level(&id, 2, 1))?.module(&model))?, &b2, &format!("{} α²[1]", id))?;
        same(&e(e(engine.beta(&id, 2, None))?.beta.module(&model))?, &b2, &format!("{} β²", id))?;
        let l = e(e(engine.l_seed(&id, 2))?.ok_or("no L presentation")?.module(&model))?;
        // dx∧dy/z^e pulls back to k²(ab)^{k-1-e} da∧db
        for (ee, inside) in [(k - 1, true), (k, false)] {
            let w = f(format!("dx^dy/z^{}", ee))?;
            ensure(e(l.contains(&w))? == inside, format!("{} L membership of /z^{}", id, ee))?;
            let pulled = e(model.to_work(&w))?;
            let holo = pulled.components().values().all(|g| g.laurent_terms().keys().all(|x| x.iter().all(|&a| a >= 0)));
            ensure(holo == inside, format!("{} pullback of /z^{}", id, ee))?;
        }
        if k >= 4 {
            let omega = span(engine, &id, 2, &[])?;
            let witnesses = [format!("dx^dy/z^{}", m - 1), format!("dx^dy/z^{}", m), format!("dx^dy/z^{}", k - 1)];
            let chain = [&omega, &a2, &b2, &l];
            for (i, w) in witnesses.iter().enumerate() {
                let w = f(w.clone())?;
                ensure(!e(chain[i].contains(&w))? && e(chain[i + 1].contains(&w))?, format!("{} chain step {}", id, i))?;
                for g in chain[i].gens() {
                    ensure(e(chain[i + 1].contains(g))?, format!("{} chain inclusion {}", id, i))?;
                }
            }
        }
    }
    Ok("S_2..S_8 α¹, α², β², L bounds, strict chain k ≥ 4".into())
}

const BUILTINS: &[&str] = &[
    "curve35", "affine(s)", "S(2)", "S(3)", "S(4)", "S(5)", "S(6)", "S(7)", "S(8)", "M(2)", "M(3)", "M(4)", "M(5)", "M(6)",
    "Fermat(3)", "Fermat(4)", "Fermat(5)", "Fermat(6)", "Fermat(8)",
];

fn criterion3(engine: &Engine) -> Check {
    let mut n = 0;
    for id in BUILTINS {
        let normal = e(builtin(id))?.normal;
        let model = e(engine.model(id))?;
        for q in 0..=model.dim() {
            let p = e(engine.beta(id, q, None))?.p_star;
            ensure(p <= q, format!("{} q={} p*={}", id, q, p))?;
            ensure(!(normal && q >= 1) || p + 1 <= q, format!("{} normal q={} p*={}", id, q, p))?;
            n += 1;
        }
    }
    Ok(format!("{} (variety, degree) pairs", n))
}

fn criterion4(engine: &Engine) -> Check {
    Ok(format!("{} checks over M_2..M_6", rows(engine, "Mk")?))
}

fn criterion5(engine: &Engine) -> Check {
    let n = rows(engine, "Fermat")?;
    for nn in [3i64, 4, 5, 6, 8] {
        let id = format!("Fermat({})", nn);
        let p = nn / 2;
        let mut forms = vec![if nn % 2 == 0 {
            format!("a^{p}*b^{p}*da^db/z^{}", 2 * p - 1)
        } else {
            format!("a^{p}*b^{p}*da^db/z^{}", 2 * p)
        }];
        if nn % 2 == 0 {
            forms.push(format!("a^{q}*b^{q}*da^db/z^{q}", q = p - 1));
        }
        let omega = e(engine.omega(&id, 2))?;
        for t in forms {
            ensure(!e(omega.contains(&parse(engine, &id, &t)?))?, format!("{} in Ω² on {}", t, id))?;
        }
    }
    Ok(format!("{} certificate checks, all forms outside Ω²", n))
}

fn criterion6(engine: &Engine) -> Check {
    let n = rows(engine, "maps")?;
    // direct check of f*d = d f* and f*(g∧h) = f*g∧f*h on level generators
    for map in ["q(4)", "f(4)", "pi(4)", "slice(4)", "id(S(4))", "compose(slice(4),q(4))"] {
        let spec = e(engine.reg.map(map))?;
        let (src, tgt) = (e(engine.model(&spec.source))?, e(engine.model(&spec.target))?);
        let top = src.dim().min(tgt.dim());
        let gens: Vec<DiffForm> = (0..top).flat_map(|q| e(engine.alpha_level(&spec.target, q, 1)).map(|g| g.gens.clone()).unwrap_or_default()).collect();
        let pb = |u: &DiffForm| e(engine.reg.pullback(&spec, u));
        let eq = |a: &DiffForm, b: &DiffForm| -> Result<bool, String> { Ok(src.equal(&e(src.to_work(a))?, &e(src.to_work(b))?)) };
        for g in gens.iter().take(6) {
            let (l, r) = (pb(&e(tgt.d(g))?)?, e(src.d(&pb(g)?))?);
            ensure(eq(&l, &r)?, format!("{}: d does not commute on {}", map, tgt.print(g)))?;
            for h in gens.iter().take(4) {
                if g.degree() + h.degree() > top {
                    continue;
                }
                let (l, r) = (pb(&e(tgt.wedge(g, h))?)?, e(src.wedge(&pb(g)?, &pb(h)?))?);
                ensure(eq(&l, &r)?, format!("{}: ∧ does not commute", map))?;
            }
        }
    }
    Ok(format!("{} map checks", n))
}

fn criterion7(engine: &Engine) -> Check {
    let mut worst: f64 = 0.0;
    for name in ["smooth-disc", "curve35", "S2-diagonal"] {
        let c = find(&stokes_cases(), name).ok_or("missing case")?;
        let m = e(engine.model(&c.cycle.variety))?;
        let (res, rep) = e(stokes_residual(&engine.reg, &c.cycle, &c.rho, &e(m.parse(&c.u))?, &e(m.parse(&c.v))?, &default_eps(), QuadOptions::default()))?;
        ensure(rep.converged && res < 1e-6, format!("{}: residual {:e}", name, res))?;
        worst = worst.max(res);
    }
    Ok(format!("max residual {:.1e}", worst))
}

fn criterion8(engine: &Engine) -> Check {
    for c in integrate_cases() {
        let m = e(engine.model(&c.cycle.variety))?;
        let r = e(integrate(&engine.reg, &c.cycle, &c.rho, &e(m.parse(&c.u))?, &e(m.parse(&c.v))?, &default_eps(), QuadOptions::default(), None))?;
        ensure(r.converged && r.monotone(), format!("{}: increments {:?}", c.name, r.increments()))?;
    }
    let c = s4_family();
    let m = e(engine.model(&c.cycle.variety))?;
    let scan = e(family_scan(&engine.reg, &c.cycle, &c.rho, &e(m.parse(&c.u))?, &e(m.parse(&c.v))?, None, &default_eps(), QuadOptions::default()))?;
    ensure(scan.failures.is_empty(), format!("unconverged at t = {:?}", scan.failures))?;
    ensure(scan.bounded(), "family unbounded")?;
    for (t, r) in scan.t.iter().zip(&scan.reports) {
        ensure(r.limit.norm() <= scan.constant * r.mass * (1.0 + 1e-12), format!("bound fails at t = {}", t))?;
    }
    Ok(format!("Cauchy and monotone; |φ| ≤ {:.3}·mass on {} points", scan.constant, scan.t.len()))
}

fn criterion9(engine: &Engine) -> Check {
    let mut covers = vec![Cover::Curve35];
    covers.extend((2..=8).map(Cover::Sk));
    let mut n = 0;
    for c in covers {
        let model = e(engine.model(&c.id()))?;
        for (ex, top) in c.queries() {
            let q = if top { c.dim() } else { 0 };
            let dec = e(decide_monomial(&model, &c.monomial_form(&ex, top)))?;
            let brute = brute_integral(c, &c.multidegree(&ex, top), &c.omega_degrees(q), 24).is_some();
            ensure(dec.inside == brute, format!("{} {:?} top={}: decision {} vs brute force {}", c.id(), ex, top, dec.inside, brute))?;
            n += 1;
        }
    }
    Ok(format!("{} queries agree", n))
}

fn main() {
    let engine = Engine::default();
    let criteria: [(fn(&Engine) -> Check, Option<u64>); 9] = [
        (criterion1, Some(5)),
        (criterion2, Some(60)),
        (criterion3, None),
        (criterion4, None),
        (criterion5, None),
        (criterion6, None),
        (criterion7, Some(60)),
        (criterion8, None),
        (criterion9, None),
    ];
    let mut failed = 0;
    for (i, (f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = f(&engine);
        let dt = start.elapsed();
        if let (Ok(_), Some(s)) = (&out, limit) {
            // time limits are stated for optimized builds
            if !cfg!(debug_assertions) && dt > Duration::from_secs(*s) {
                out = Err(format!("took {:.1?}, limit {} s", dt, s));
            }
        }
        match out {
            Ok(msg) => println!("criterion {}: PASS ({}, {:.2?})", i + 1, msg, dt),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL ({}, {:.2?})", i + 1, msg, dt);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
