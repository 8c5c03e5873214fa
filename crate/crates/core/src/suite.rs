//! Data-driven verification suite: expected values live in TOML fixtures under
//! `fixtures/verify`, certificates under `fixtures/certificates`.

use crate::beta::{check_functoriality, check_pullback_levels, classify, Engine, Rung};
use crate::closure::{load_certificate_template, template, verify_certificate, VerdictTag};
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::numeric::{self, cases, QuadOptions};
use crate::variety::{Model, OModule};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Environment variable overriding the fixture directory.
pub const FIXTURE_ENV: &str = "SINGFORMS_FIXTURES";

pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURE_ENV) {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures")),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub variety: Option<String>,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub set: Option<String>,
    #[serde(default)]
    pub form: Option<String>,
    /// Apply d to the form before use.
    #[serde(default)]
    pub differential: bool,
    #[serde(default)]
    pub expected: Vec<String>,
    #[serde(default)]
    pub member: Option<bool>,
    #[serde(default)]
    pub p_star: Option<usize>,
    #[serde(default)]
    pub equals_set: Option<String>,
    #[serde(default)]
    pub expect: BTreeMap<String, bool>,
    #[serde(default)]
    pub level: Option<usize>,
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default)]
    pub outside_omega: bool,
    #[serde(default)]
    pub map: Option<String>,
    #[serde(default)]
    pub inner: Option<String>,
    #[serde(default)]
    pub via: Option<String>,
    #[serde(default)]
    pub result: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Template parameter name (k or n) and its values.
    #[serde(default)]
    pub param: Option<String>,
    #[serde(default)]
    pub values: Vec<i64>,
}

#[derive(Debug, Deserialize)]
struct SuiteFile {
    scope: String,
    #[serde(rename = "case")]
    cases: Vec<CaseSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub id: String,
    pub scope: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

impl Row {
    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "scope": self.scope, "expected": self.expected, "computed": self.computed, "pass": self.pass})
    }
}

pub fn table(rows: &[Row]) -> String {
    let w = rows.iter().map(|r| r.id.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:<w$}  {:<4}  {:<40}  {}\n", "case", "ok", "expected", "computed", w = w);
    for r in rows {
        s.push_str(&format!("{:<w$}  {:<4}  {:<40}  {}\n", r.id, if r.pass { "pass" } else { "FAIL" }, r.expected, r.computed, w = w));
    }
    s
}

/// Load every suite file in `dir/verify`, sorted by file name.
pub fn load_suites(dir: &Path) -> Result<Vec<(String, Vec<CaseSpec>)>> {
    let vdir = dir.join("verify");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&vdir)
        .map_err(|e| Error::Io { path: vdir.display().to_string(), msg: e.to_string() })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "toml").unwrap_or(false))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| Error::Io { path: f.display().to_string(), msg: e.to_string() })?;
        let s: SuiteFile = toml::from_str(&text).map_err(|e| Error::Schema {
            file: f.display().to_string(),
            line: e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0),
            field: String::new(),
            msg: e.message().to_string(),
        })?;
        out.push((s.scope, s.cases));
    }
    Ok(out)
}

/// Run the suite for a scope (`all` or a scope name such as `Sk`).
pub fn run(engine: &Engine, dir: &Path, scope: &str) -> Result<Vec<Row>> {
    let suites = load_suites(dir)?;
    if scope != "all" && !suites.iter().any(|(s, _)| s == scope) {
        return Err(Error::InvalidParameter(format!(
            "unknown scope '{}' (available: all, {})",
            scope,
            suites.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut rows = Vec::new();
    for (s, cases) in suites {
        if scope != "all" && s != scope {
            continue;
        }
        for c in cases {
            for (suffix, vars) in instances(&c) {
                let id = format!("{}{}", c.id, suffix);
                let row = match run_case(engine, dir, &c, &vars) {
                    Ok((expected, computed, pass)) => Row { id, scope: s.clone(), expected, computed, pass },
                    Err(e) => Row { id, scope: s.clone(), expected: "no error".into(), computed: format!("error: {}", e), pass: false },
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn instances(c: &CaseSpec) -> Vec<(String, BTreeMap<String, i64>)> {
    match &c.param {
        None => vec![(String::new(), BTreeMap::new())],
        Some(p) => c
            .values
            .iter()
            .map(|&v| {
                let mut vars = BTreeMap::new();
                vars.insert(p.clone(), v);
                match p.as_str() {
                    "k" => vars.insert("m".into(), v / 2),
                    _ => vars.insert("p".into(), v / 2),
                };
                (format!("[{}={}]", p, v), vars)
            })
            .collect(),
    }
}

struct Ctx<'a> {
    engine: &'a Engine,
    vars: &'a BTreeMap<String, i64>,
}

impl Ctx<'_> {
    fn s(&self, t: &Option<String>, what: &str) -> Result<String> {
        let t = t.as_ref().ok_or_else(|| Error::InvalidParameter(format!("case needs '{}'", what)))?;
        template::instantiate(t, self.vars)
    }

    fn model(&self, c: &CaseSpec) -> Result<(String, Arc<Model>)> {
        let id = self.s(&c.variety, "variety")?;
        let m = self.engine.model(&id)?;
        Ok((m.spec().id.clone(), m))
    }

    fn form(&self, m: &Model, text: &str, differential: bool) -> Result<DiffForm> {
        let u = m.parse(&template::instantiate(text, self.vars)?)?;
        if differential {
            m.d(&u)
        } else {
            Ok(u)
        }
    }

    fn set_module(&self, id: &str, m: &Arc<Model>, set: &str, q: usize) -> Result<OModule> {
        let gens = match set {
            "omega" => m.omega_gens(q)?,
            "alpha" => self.engine.alpha_level(id, q, 0)?.gens.clone(),
            "beta" => self.engine.beta(id, q, None)?.beta.gens.clone(),
            "L" => self.engine.l_seed(id, q)?.ok_or_else(|| Error::MissingSeed { variety: id.into(), q })?.gens.clone(),
            other => return Err(Error::InvalidParameter(format!("unknown set '{}'", other))),
        };
        OModule::new(m.clone(), q, gens)
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run_case(engine: &Engine, dir: &Path, c: &CaseSpec, vars: &BTreeMap<String, i64>) -> Result<(String, String, bool)> {
    let cx = Ctx { engine, vars };
    match c.kind.as_str() {
        "module" => {
            let (id, m) = cx.model(c)?;
            let q = c.degree.unwrap_or(0);
            let set = c.set.clone().unwrap_or_else(|| "alpha".into());
            let have = cx.set_module(&id, &m, &set, q)?;
            let mut gens = m.omega_gens(q)?;
            for e in &c.expected {
                gens.push(cx.form(&m, e, false)?);
            }
            let want = OModule::new(m.clone(), q, gens)?;
            let eq = have.equals(&want)?;
            let expected: Vec<String> = c.expected.iter().map(|e| template::instantiate(e, vars)).collect::<Result<_>>()?;
            Ok((format!("{}^{} = Ω + O·{{{}}}", set, q, expected.join(", ")), if eq { "equal".into() } else { "differs".into() }, eq))
        }
        "member" => {
            let (id, m) = cx.model(c)?;
            let u = cx.form(&m, c.form.as_deref().unwrap_or(""), c.differential)?;
            let set = c.set.clone().unwrap_or_else(|| "alpha".into());
            let got = cx.set_module(&id, &m, &set, u.degree())?.contains(&u)?;
            let want = c.member.unwrap_or(true);
            Ok((format!("in {}: {}", set, yn(want)), format!("in {}: {}", set, yn(got)), got == want))
        }
        "beta" => {
            let (id, m) = cx.model(c)?;
            let q = c.degree.unwrap_or(0);
            let b = engine.beta(&id, q, None)?;
            let mut ok = c.p_star.map(|p| p == b.p_star).unwrap_or(true);
            let mut computed = format!("p* = {}", b.p_star);
            if let Some(set) = &c.equals_set {
                let other = cx.set_module(&id, &m, set, q)?;
                let eq = OModule::new(m.clone(), q, b.beta.gens.clone())?.equals(&other)?;
                ok &= eq;
                computed.push_str(&format!(", beta {} {}", if eq { "=" } else { "!=" }, set));
            }
            let expected = format!("p* = {}{}", c.p_star.map(|p| p.to_string()).unwrap_or("-".into()), c.equals_set.as_ref().map(|s| format!(", beta = {}", s)).unwrap_or_default());
            Ok((expected, computed, ok))
        }
        "classify" => {
            let (id, m) = cx.model(c)?;
            let u = cx.form(&m, c.form.as_deref().unwrap_or(""), c.differential)?;
            let r = classify(engine, &id, &u, None, None)?;
            let mut ok = true;
            let mut exp = Vec::new();
            let mut got = Vec::new();
            for (name, want) in &c.expect {
                let rung = match name.as_str() {
                    "omega" => Rung::Omega,
                    "alpha" => Rung::Alpha,
                    "alpha_level" => Rung::AlphaLevel,
                    "beta" => Rung::Beta,
                    "L" => Rung::L,
                    other => return Err(Error::InvalidParameter(format!("unknown rung '{}'", other))),
                };
                let a = r.answer(rung);
                ok &= a == Some(*want);
                exp.push(format!("{} {}", name, yn(*want)));
                got.push(format!("{} {}", name, a.map(yn).unwrap_or("unknown")));
            }
            if let Some(l) = c.level {
                ok &= r.level == Some(l);
                exp.push(format!("p = {}", l));
                got.push(format!("p = {}", r.level.map(|p| p.to_string()).unwrap_or("?".into())));
            }
            Ok((exp.join(", "), got.join(", "), ok))
        }
        "certificate" => {
            let file = c.file.as_ref().ok_or_else(|| Error::InvalidParameter("certificate case needs 'file'".into()))?;
            let path = dir.join("certificates").join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
            let cert = load_certificate_template(&text, &path.display().to_string(), vars)?;
            let chk = verify_certificate(&engine.reg, &cert)?;
            let mut ok = chk.valid;
            let mut computed = if chk.valid { "valid".to_string() } else { format!("rejected: {}", chk.reason.clone().unwrap_or_default()) };
            let mut expected = "valid".to_string();
            if c.outside_omega {
                // the certified form lives on the pullback source when there is one
                let (vid, u) = match &cert.pullback {
                    Some(map) => {
                        let mp = engine.reg.map(map)?;
                        let src = engine.model(&mp.source)?;
                        let tgt = engine.reg.variety(&cert.variety)?;
                        let scale = crate::parse::parse_rational(cert.scale.as_deref().unwrap_or("1"))?;
                        (src.spec().id.clone(), src.to_work(&engine.reg.pullback(&mp, &tgt.parse(&cert.form)?)?)?.scale(&scale))
                    }
                    None => {
                        let m = engine.model(&cert.variety)?;
                        (m.spec().id.clone(), m.parse(&cert.form)?)
                    }
                };
                let inside = engine.omega(&vid, u.degree())?.contains(&u)?;
                ok &= !inside;
                expected.push_str(", not in Ω");
                computed.push_str(if inside { ", in Ω" } else { ", not in Ω" });
                if let Some(r) = &c.result {
                    let m = engine.model(&vid)?;
                    let want = cx.form(&m, r, false)?;
                    let same = m.equal(&want, &u);
                    ok &= same;
                    expected.push_str(&format!(", form {}", template::instantiate(r, vars)?));
                    computed.push_str(if same { ", form matches" } else { ", form differs" });
                }
            }
            Ok((expected, computed, ok))
        }
        "refute" => {
            let (id, m) = cx.model(c)?;
            let u = cx.form(&m, c.form.as_deref().unwrap_or(""), c.differential)?;
            let v = engine.classify_alpha(&id, &u, None)?;
            let mut ok = v.tag == VerdictTag::NotInAlphaRefuted;
            let route = match &v.evidence {
                crate::closure::Evidence::Pullback { map, inner, .. } => match &inner.evidence {
                    crate::closure::Evidence::ProductRule { .. } => format!("{} + product rule", map),
                    _ => map.clone(),
                },
                crate::closure::Evidence::Arc(a) => format!("arc {}", a.description),
                crate::closure::Evidence::ProductRule { .. } => "product rule".into(),
                _ => "-".into(),
            };
            let mut expected = "refuted".to_string();
            if let Some(via) = &c.via {
                let via = template::instantiate(via, vars)?;
                ok &= route.starts_with(&via);
                expected = format!("refuted via {}", via);
            }
            ok &= v.refuting_arc().is_some();
            Ok((expected, format!("{} via {}", v.tag.name(), route), ok))
        }
        "chain" => {
            let (id, m) = cx.model(c)?;
            let q = c.degree.unwrap_or(0);
            let sets = ["omega", "alpha", "beta", "L"];
            let mods: Vec<OModule> = sets.iter().map(|s| cx.set_module(&id, &m, s, q)).collect::<Result<_>>()?;
            let mut strict = true;
            for w in mods.windows(2) {
                let inc = w[0].gens().iter().map(|g| w[1].contains(g)).collect::<Result<Vec<bool>>>()?.into_iter().all(|b| b);
                strict &= inc && !w[1].equals(&w[0])?;
            }
            Ok(("Ω ⊊ α ⊊ β ⊊ L".into(), if strict { "strict".into() } else { "not strict".into() }, strict))
        }
        "pullback" => {
            let map = cx.s(&c.map, "map")?;
            let mp = engine.reg.map(&map)?;
            let tgt = engine.model(&mp.target)?;
            let src = engine.model(&mp.source)?;
            let u = cx.form(&tgt, c.form.as_deref().unwrap_or(""), c.differential)?;
            let pb = src.to_work(&engine.reg.pullback(&mp, &tgt.to_ambient(&u)?)?)?;
            let want = cx.form(&src, c.result.as_deref().unwrap_or(""), false)?;
            let ok = src.equal(&pb, &want);
            Ok((template::instantiate(c.result.as_deref().unwrap_or(""), vars)?, src.print(&src.to_ambient(&pb)?), ok))
        }
        "pullback-levels" => {
            let map = cx.s(&c.map, "map")?;
            let r = check_pullback_levels(engine, &map, 0..=c.level.unwrap_or(2))?;
            let computed = match r.offending() {
                Some(o) => format!("fails at degree {} level {}: {}", o.q, o.p, o.generator),
                None => format!("{} generators preserved, wedge {}, d {}", r.levels.len(), yn(r.wedge_ok), yn(r.d_ok)),
            };
            Ok(("levels preserved, wedge/d commute".into(), computed, r.ok()))
        }
        "functoriality" => {
            let outer = cx.s(&c.map, "map")?;
            let inner = cx.s(&c.inner, "inner")?;
            let r = check_functoriality(engine, &outer, &inner)?;
            Ok(("(g∘f)* = f*g*".into(), format!("{} forms checked, {}", r.checked, if r.ok { "equal" } else { "differ" }), r.ok))
        }
        "bounds" => {
            let (id, m) = cx.model(c)?;
            let normal = m.spec().normal;
            let mut got = Vec::new();
            let mut ok = true;
            for q in 0..=m.dim() {
                match engine.beta(&id, q, None) {
                    Ok(b) => got.push(format!("p*_{} = {}", q, b.p_star)),
                    Err(e) => {
                        ok = false;
                        got.push(format!("q = {}: {}", q, e));
                    }
                }
            }
            let exp = if normal { "p* ≤ max(q-1, 0)" } else { "p* ≤ q" };
            Ok((exp.into(), got.join(", "), ok))
        }
        "stokes" => {
            let name = cx.s(&c.name, "name")?;
            let case = cases::find(&cases::stokes_cases(), &name).ok_or_else(|| Error::InvalidParameter(format!("no Stokes case '{}'", name)))?;
            let m = engine.model(&case.cycle.variety)?;
            let (u, v) = (m.spec().parse(&case.u)?, m.spec().parse(&case.v)?);
            let (res, _) = numeric::stokes_residual(&engine.reg, &case.cycle, &case.rho, &u, &v, &numeric::default_eps(), QuadOptions::default())?;
            let th = c.threshold.unwrap_or(1e-6);
            Ok((format!("residual < {:e}", th), format!("{:.3e}", res), res < th))
        }
        "integrate" => {
            let name = cx.s(&c.name, "name")?;
            let case = cases::find(&cases::integrate_cases(), &name).ok_or_else(|| Error::InvalidParameter(format!("no integration case '{}'", name)))?;
            let m = engine.model(&case.cycle.variety)?;
            let (u, v) = (m.spec().parse(&case.u)?, m.spec().parse(&case.v)?);
            let r = numeric::integrate(&engine.reg, &case.cycle, &case.rho, &u, &v, &numeric::default_eps(), QuadOptions::default(), None)?;
            let mut ok = r.converged;
            let mut expected = "converges".to_string();
            if let Some(e) = &c.result {
                let want: f64 = e.parse().map_err(|_| Error::InvalidParameter(format!("bad number '{}'", e)))?;
                let th = c.threshold.unwrap_or(1e-6);
                ok &= (r.limit.re - want).abs() <= th * want.abs().max(1.0) && r.limit.im.abs() <= th;
                expected.push_str(&format!(" to {}", e));
            }
            Ok((expected, format!("{:.10} ({})", r.limit.re, if r.converged { "converged" } else { "not converged" }), ok))
        }
        other => Err(Error::InvalidParameter(format!("unknown case kind '{}'", other))),
    }
}
