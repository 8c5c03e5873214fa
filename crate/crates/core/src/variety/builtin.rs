use super::{param_of, DeckGroup, FormTable, Parametrization, ProductInfo, VarietySpec};
use crate::error::{Error, Result};
use crate::forms::{MapSpec, MapWitness};
use crate::parse::parse_poly;
use crate::poly::{rat, Polynomial};
use std::collections::BTreeMap;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn polys(src: &[String], vars: &[String]) -> Vec<Polynomial> {
    src.iter().map(|s| parse_poly(s, vars).expect("builtin polynomial")).collect()
}

/// `z^e` with the exponent folded away when it is zero.
fn over(num: &str, var: &str, e: i64) -> String {
    match e {
        0 => num.to_string(),
        1 => format!("{}/{}", num, var),
        _ => format!("{}/{}^{}", num, var, e),
    }
}

fn table(source: &str, rows: Vec<(usize, Vec<String>)>) -> FormTable {
    FormTable { source: source.into(), forms: rows.into_iter().collect() }
}

/// Look up a built-in variety by id: `curve35`, `S(k)`, `M(k)`, `Fermat(n)`,
/// `product(A,w)` or `affine(a,b,...)`.
pub fn builtin(id: &str) -> Result<VarietySpec> {
    let id = id.trim();
    if id == "curve35" {
        return Ok(curve35());
    }
    if let Some(inner) = id.strip_prefix("product(").and_then(|s| s.strip_suffix(')')) {
        let (a, w) = split_top(inner).ok_or_else(|| Error::UnknownVariety(id.into()))?;
        return product(&builtin(&a)?, &w);
    }
    if let Some(inner) = id.strip_prefix("affine(").and_then(|s| s.strip_suffix(')')) {
        let vars: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        return affine(&vars);
    }
    if let Some(k) = param_of(id, "S") {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("S(k) needs k >= 2, got {}", k)));
        }
        return Ok(surface_s(k));
    }
    if let Some(k) = param_of(id, "M") {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("M(k) needs k >= 2, got {}", k)));
        }
        return Ok(threefold_m(k));
    }
    if let Some(n) = param_of(id, "Fermat") {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("Fermat(n) needs n >= 3, got {}", n)));
        }
        return Ok(fermat(n));
    }
    Err(Error::UnknownVariety(id.into()))
}

/// Split `A,b` at the last top-level comma.
pub(crate) fn split_top(s: &str) -> Option<(String, String)> {
    let mut depth = 0i32;
    let mut cut = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => cut = Some(i),
            _ => {}
        }
    }
    let i = cut?;
    Some((s[..i].trim().to_string(), s[i + 1..].trim().to_string()))
}

fn curve35() -> VarietySpec {
    let vars = names(&["x", "y"]);
    let params = names(&["t"]);
    let mut golden = BTreeMap::new();
    golden.insert("alpha0".into(), names(&["1", "y^2/x", "y^4/x^2", "y^3/x", "y^4/x"]));
    golden.insert("alpha1".into(), names(&["y^2*dy/x"]));
    golden.insert("beta1".into(), names(&["y^2*dx/x^2"]));
    golden.insert("omega0".into(), names(&["y/x^2"]));
    golden.insert("omega1".into(), names(&["dy/x^2"]));
    VarietySpec {
        id: "curve35".into(),
        equations: polys(&names(&["x^3 - y^5"]), &vars),
        singular: polys(&names(&["x", "y"]), &vars),
        parametrization: Some(Parametrization { components: polys(&names(&["t^5", "t^3"]), &params), params }),
        deck: None,
        dim: 1,
        normal: false,
        poles: vec![true, true],
        l_presentation: None,
        alpha_seeds: None,
        golden,
        product: None,
        notes: vec![
            "beta1 lists a single generator; the computed beta1 is the full level-1 module, equal to L1".into(),
            "omega0 and omega1 are comparison data only".into(),
        ],
        vars,
    }
}

fn surface_s(k: i64) -> VarietySpec {
    let m = k / 2;
    let vars = names(&["x", "y", "z"]);
    let params = names(&["a", "b"]);
    let mut golden = BTreeMap::new();
    golden.insert("alpha1".into(), vec![over("x*dy", "z", m)]);
    golden.insert("alpha2".into(), vec![over("dx^dy", "z", m - 1)]);
    golden.insert("beta1".into(), vec![over("x*dy", "z", m)]);
    golden.insert("beta2".into(), vec![over("dx^dy", "z", m)]);
    golden.insert("L2".into(), vec![over("dx^dy", "z", k - 1)]);
    VarietySpec {
        id: format!("S({})", k),
        equations: vec![parse_poly(&format!("x*y - z^{}", k), &vars).unwrap()],
        singular: polys(&names(&["x", "y", "z"]), &vars),
        parametrization: Some(Parametrization {
            components: polys(&[format!("a^{}", k), format!("b^{}", k), "a*b".into()], &params),
            params,
        }),
        deck: Some(DeckGroup { order: k as u32, weights: vec![1, k - 1] }),
        dim: 2,
        normal: true,
        poles: vec![true, true, true],
        l_presentation: Some(table("declared", vec![(2, vec![over("dx^dy", "z", k - 1)])])),
        alpha_seeds: None,
        golden,
        product: None,
        notes: vec![format!("m = {}", m)],
        vars,
    }
}

fn threefold_m(k: i64) -> VarietySpec {
    let m = k / 2;
    let vars = names(&["x", "y", "u", "v"]);
    let mut spec = VarietySpec {
        id: format!("M({})", k),
        equations: vec![parse_poly(&format!("x*y - u^{}*v", k), &vars).unwrap()],
        singular: vec![],
        parametrization: None,
        deck: None,
        dim: 3,
        normal: true,
        poles: vec![false, false, true, false],
        l_presentation: None,
        alpha_seeds: Some(table("declared", vec![(1, vec![over("x*dy", "u", m)])])),
        golden: BTreeMap::new(),
        product: None,
        notes: vec![
            format!("m = {}", m),
            "alpha seeds are declared, closed under wedge with the torsion-free forms".into(),
            "no complete torsion-free presentation is claimed; refutations go through the slice v = 1 and the map pi".into(),
        ],
        vars,
    };
    spec.singular = spec.jacobian_ideal();
    spec
}

fn fermat(n: i64) -> VarietySpec {
    let p = n / 2;
    let vars = names(&["a", "b", "z"]);
    let seeds = if n % 2 == 0 {
        let pm = if p - 1 == 1 { "".to_string() } else { format!("^{}", p - 1) };
        let pull = format!("{}*(a^{} - b^{})*(a{}*da + b{}*db)", p, p, p, pm, pm);
        table(
            "declared",
            vec![
                (1, vec![over(&pull, "z", p)]),
                (
                    2,
                    vec![
                        over(&format!("a^{}*b^{}*da^db", p, p), "z", 2 * p - 1),
                        over(&monomial_ab(p - 1, "da^db"), "z", p - 1),
                    ],
                ),
            ],
        )
    } else {
        table("declared", vec![(2, vec![over(&format!("a^{}*b^{}*da^db", p, p), "z", 2 * p)])])
    };
    let mut golden = BTreeMap::new();
    golden.insert("alpha2".into(), seeds.forms[&2].clone());
    VarietySpec {
        id: format!("Fermat({})", n),
        equations: vec![parse_poly(&format!("a^{} - b^{} - z^{}", n, n, n), &vars).unwrap()],
        singular: polys(&names(&["a", "b", "z"]), &vars),
        parametrization: None,
        deck: None,
        dim: 2,
        normal: true,
        poles: vec![false, false, true],
        l_presentation: None,
        alpha_seeds: Some(seeds),
        golden,
        product: None,
        notes: if n % 2 == 0 {
            vec![format!("degree-1 seed is the pullback of x*dy/z^{} along f({})", p, n)]
        } else {
            vec![]
        },
        vars,
    }
}

fn monomial_ab(e: i64, tail: &str) -> String {
    match e {
        0 => tail.to_string(),
        1 => format!("a*b*{}", tail),
        _ => format!("a^{}*b^{}*{}", e, e, tail),
    }
}

fn affine(vars: &[String]) -> Result<VarietySpec> {
    if vars.is_empty() {
        return Err(Error::InvalidParameter("affine space needs variables".into()));
    }
    let n = vars.len();
    let mut seen = std::collections::BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(Error::InvalidParameter(format!("repeated variable {}", v)));
        }
    }
    let spec = VarietySpec {
        id: format!("affine({})", vars.join(",")),
        vars: vars.to_vec(),
        equations: vec![],
        dim: n,
        singular: vec![Polynomial::one(n)],
        parametrization: Some(Parametrization {
            params: vars.to_vec(),
            components: (0..n).map(|i| Polynomial::var(n, i)).collect(),
        }),
        deck: None,
        normal: true,
        poles: vec![false; n],
        l_presentation: None,
        alpha_seeds: None,
        golden: BTreeMap::new(),
        product: None,
        notes: vec![],
    };
    spec.validate()?;
    Ok(spec)
}

/// A × C with one extra smooth coordinate.
pub fn product(a: &VarietySpec, disc: &str) -> Result<VarietySpec> {
    if a.vars.iter().any(|v| v == disc)
        || a.parametrization.as_ref().map(|p| p.params.iter().any(|v| v == disc)).unwrap_or(false)
    {
        return Err(Error::InvalidParameter(format!("variable '{}' already used by {}", disc, a.id)));
    }
    if disc.is_empty() || disc.starts_with('d') || !disc.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::InvalidParameter(format!("bad coordinate name '{}'", disc)));
    }
    let n = a.nvars();
    let map: Vec<usize> = (0..n).collect();
    let mut vars = a.vars.clone();
    vars.push(disc.to_string());
    let parametrization = a.parametrization.as_ref().map(|p| {
        let s = p.params.len();
        let pmap: Vec<usize> = (0..s).collect();
        let mut components: Vec<Polynomial> = p.components.iter().map(|c| c.remap(s + 1, &pmap)).collect();
        components.push(Polynomial::var(s + 1, s));
        let mut params = p.params.clone();
        params.push(disc.to_string());
        Parametrization { params, components }
    });
    let deck = a.deck.as_ref().map(|d| {
        let mut w = d.weights.clone();
        w.push(0);
        DeckGroup { order: d.order, weights: w }
    });
    let mut poles = a.poles.clone();
    poles.push(false);
    let spec = VarietySpec {
        id: format!("product({},{})", a.id, disc),
        equations: a.equations.iter().map(|f| f.remap(n + 1, &map)).collect(),
        singular: a.singular.iter().map(|f| f.remap(n + 1, &map)).collect(),
        dim: a.dim + 1,
        parametrization,
        deck,
        normal: a.normal,
        poles,
        l_presentation: None,
        alpha_seeds: None,
        golden: BTreeMap::new(),
        product: Some(ProductInfo { factor: a.id.clone(), disc: disc.to_string() }),
        notes: vec![],
        vars,
    };
    Ok(spec)
}

/// f : F(2p) → S(2p), (a, b, z) ↦ (a^p − b^p, a^p + b^p, z).
pub fn fermat_to_s_map(n: i64) -> Result<MapSpec> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("f(n) needs even n >= 4, got {}", n)));
    }
    let p = n / 2;
    let src = names(&["a", "b", "z"]);
    Ok(MapSpec {
        id: format!("f({})", n),
        source: format!("Fermat({})", n),
        target: format!("S({})", n),
        components: polys(&[format!("a^{} - b^{}", p, p), format!("a^{} + b^{}", p, p), "z".into()], &src),
        witness: MapWitness { point: vec![rat(1), rat(1), rat(0)] },
        inclusion: false,
    })
}

/// Built-in maps: `q(k)`, `f(n)`, `slice(k)`, `pi(k)`, `id(V)`, `compose(g,f)` (g after f).
pub fn builtin_map(id: &str) -> Result<MapSpec> {
    let id = id.trim();
    if let Some(inner) = id.strip_prefix("compose(").and_then(|s| s.strip_suffix(')')) {
        let (g, f) = split_first(inner).ok_or_else(|| Error::UnknownMap(id.into()))?;
        let g = builtin_map(&g)?;
        let f = builtin_map(&f)?;
        return compose(&g, &f);
    }
    if let Some(inner) = id.strip_prefix("id(").and_then(|s| s.strip_suffix(')')) {
        let v = builtin(inner)?;
        let n = v.nvars();
        let witness = MapWitness { point: generic_point(&v)? };
        return Ok(MapSpec {
            id: id.into(),
            source: v.id.clone(),
            target: v.id.clone(),
            components: (0..n).map(|i| Polynomial::var(n, i)).collect(),
            witness,
            inclusion: false,
        });
    }
    if let Some(k) = param_of(id, "q") {
        if k < 2 {
            return Err(Error::InvalidParameter("q(k) needs k >= 2".into()));
        }
        let src = names(&["a", "b"]);
        return Ok(MapSpec {
            id: id.into(),
            source: "affine(a,b)".into(),
            target: format!("S({})", k),
            components: polys(&[format!("a^{}", k), format!("b^{}", k), "a*b".into()], &src),
            witness: MapWitness { point: vec![rat(1), rat(1)] },
            inclusion: false,
        });
    }
    if let Some(n) = param_of(id, "f") {
        return fermat_to_s_map(n);
    }
    if let Some(k) = param_of(id, "slice") {
        if k < 2 {
            return Err(Error::InvalidParameter("slice(k) needs k >= 2".into()));
        }
        let src = names(&["x", "y", "z"]);
        return Ok(MapSpec {
            id: id.into(),
            source: format!("S({})", k),
            target: format!("M({})", k),
            components: polys(&names(&["x", "y", "z", "1"]), &src),
            witness: MapWitness { point: vec![rat(1), rat(1), rat(1)] },
            inclusion: true,
        });
    }
    if let Some(k) = param_of(id, "pi") {
        if k < 2 {
            return Err(Error::InvalidParameter("pi(k) needs k >= 2".into()));
        }
        let src = names(&["x", "y", "z", "v"]);
        return Ok(MapSpec {
            id: id.into(),
            source: format!("product(S({}),v)", k),
            target: format!("M({})", k),
            components: polys(&names(&["x*v", "y", "z", "v"]), &src),
            witness: MapWitness { point: vec![rat(1), rat(1), rat(1), rat(1)] },
            inclusion: false,
        });
    }
    Err(Error::UnknownMap(id.into()))
}

fn split_first(s: &str) -> Option<(String, String)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((s[..i].trim().to_string(), s[i + 1..].trim().to_string())),
            _ => {}
        }
    }
    None
}

/// g ∘ f.
pub fn compose(g: &MapSpec, f: &MapSpec) -> Result<MapSpec> {
    if f.target != g.source {
        return Err(Error::InvalidMap(format!("cannot compose {} after {}: {} != {}", g.id, f.id, f.target, g.source)));
    }
    Ok(MapSpec {
        id: format!("compose({},{})", g.id, f.id),
        source: f.source.clone(),
        target: g.target.clone(),
        components: g.components.iter().map(|c| c.compose(&f.components)).collect(),
        witness: f.witness.clone(),
        inclusion: f.inclusion && g.inclusion,
    })
}

/// A rational point of the variety off its singular locus, from the parametrization
/// or a small search.
pub fn generic_point(v: &VarietySpec) -> Result<Vec<crate::poly::Rational>> {
    if let Some(p) = &v.parametrization {
        let pt: Vec<_> = (0..p.params.len()).map(|j| rat(1 + j as i64)).collect();
        return Ok(p.components.iter().map(|c| c.eval(&pt)).collect());
    }
    // small integer search
    let n = v.nvars();
    let mut cur = vec![0i64; n];
    let range = [1i64, 0, -1, 2, -2];
    loop {
        let pt: Vec<_> = cur.iter().map(|&i| rat(range[i as usize])).collect();
        if v.equations.iter().all(|f| f.eval(&pt) == rat(0)) && v.singular.iter().any(|g| g.eval(&pt) != rat(0)) {
            return Ok(pt);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Err(Error::InvalidParameter(format!("no small rational point found on {}", v.id)));
            }
            cur[i] += 1;
            if cur[i] < range.len() as i64 {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Registered maps into a built-in variety from varieties with a cover model.
pub fn maps_into(id: &str) -> Vec<String> {
    let id = id.trim();
    if let Some(k) = param_of(id, "M") {
        return vec![format!("slice({})", k), format!("pi({})", k)];
    }
    if let Some(k) = param_of(id, "S") {
        return vec![format!("q({})", k)];
    }
    Vec::new()
}
