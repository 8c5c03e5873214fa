use super::Engine;
use crate::closure::{
    decide_monomial, refute_by_arc, stock_arcs, verify_certificate, DependenceCertificate, Evidence, MembershipVerdict,
    VerdictTag,
};
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::mero::MeroFunction;
use crate::parse::parse_rational;
use crate::poly::fmt_rational;
use crate::variety::{maps_into, Model, OModule};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

const REFUTE_WEIGHT: i64 = 4;

fn witness(model: &Model, module: &str, coeffs: Vec<crate::poly::Polynomial>) -> Evidence {
    let names = model.spec().vars.clone();
    Evidence::Witness { module: module.into(), coeffs: coeffs.iter().map(|c| crate::parse::print_poly(c, &names)).collect() }
}

fn work(model: &Model, u: &DiffForm) -> Result<DiffForm> {
    if u.coords() == model.work_coords() {
        Ok(u.clone())
    } else {
        model.to_work(u)
    }
}

/// Does the certificate speak about ω on this variety?
fn certificate_matches(engine: &Engine, model: &Arc<Model>, omega: &DiffForm, cert: &DependenceCertificate) -> Result<bool> {
    let reg = &engine.reg;
    let target = reg.variety(&cert.variety)?;
    let form = target.parse(&cert.form)?;
    match &cert.pullback {
        None => Ok(target.id == model.spec().id && model.equal(&model.to_work(&form)?, omega)),
        Some(map) => {
            let m = reg.map(map)?;
            if reg.variety(&m.source)?.id != model.spec().id {
                return Ok(false);
            }
            let scale = match &cert.scale {
                Some(s) => parse_rational(s)?,
                None => crate::poly::rat(1),
            };
            let pb = model.to_work(&reg.pullback(&m, &form)?)?.scale(&scale);
            Ok(model.equal(&pb, omega))
        }
    }
}

/// Split a working form on a product cover into factor pieces: (v-degree, has dv) ↦ form
/// on the factor cover.
fn product_parts(u: &DiffForm) -> BTreeMap<(i64, bool), DiffForm> {
    let s = u.nvars();
    let v = s - 1;
    let mut out: BTreeMap<(i64, bool), BTreeMap<Vec<usize>, BTreeMap<Vec<i64>, crate::poly::Rational>>> = BTreeMap::new();
    for (idx, f) in u.components() {
        let dv = idx.last() == Some(&v);
        let fidx: Vec<usize> = idx.iter().copied().filter(|&i| i != v).collect();
        for (e, c) in f.laurent_terms() {
            let j = e[v];
            let fe = e[..v].to_vec();
            out.entry((j, dv)).or_default().entry(fidx.clone()).or_default().insert(fe, c);
        }
    }
    out.into_iter()
        .map(|(k, comps)| {
            let deg = u.degree() - usize::from(k.1);
            let comps = comps.into_iter().map(|(i, t)| (i, MeroFunction::from_laurent(v, t))).collect();
            (k, DiffForm::from_components(v, deg, Coords::Parameter, comps))
        })
        .collect()
}

impl Engine {
    /// Membership of ω in α^q, with evidence. `cert` is an optional supplied certificate.
    pub fn classify_alpha(&self, id: &str, omega: &DiffForm, cert: Option<&DependenceCertificate>) -> Result<MembershipVerdict> {
        let model = self.model(id)?;
        let omega = work(&model, omega)?;
        let q = omega.degree();
        if q > model.dim() {
            return Err(Error::DegreeTooLarge { degree: q, dim: model.dim() });
        }
        if model.is_zero(&omega) {
            return Ok(MembershipVerdict::new(VerdictTag::InOmegaTorsionFree, Evidence::None).note("zero form"));
        }
        let om = self.omega(id, q)?;
        if let Some(c) = om.membership(&omega)? {
            return Ok(MembershipVerdict::new(VerdictTag::InOmegaTorsionFree, witness(&model, "omega", c)));
        }
        if let Some(cert) = cert {
            if !certificate_matches(self, &model, &omega, cert)? {
                return Err(Error::InvalidParameter("certificate does not concern this form".into()));
            }
            let chk = verify_certificate(&self.reg, cert)?;
            if chk.valid {
                return Ok(MembershipVerdict::new(VerdictTag::InAlphaCertified, Evidence::Certificate(cert.clone())));
            }
            let v = self.classify_alpha(id, &omega, None)?;
            return Ok(v.note(format!("supplied certificate rejected: {}", chk.reason.unwrap_or_default())));
        }
        if model.spec().product.is_some() {
            return self.classify_product(&model, &omega);
        }
        if let Some(pm) = model.param() {
            let rank = model.positions(q).len();
            if rank == 1 && omega.components().len() == 1 && omega.components().values().next().unwrap().laurent_terms().len() == 1 {
                match decide_monomial(&model, &omega) {
                    Ok(d) => {
                        return Ok(if d.inside {
                            let lambda = d.lambda.as_ref().unwrap().iter().map(fmt_rational).collect();
                            MembershipVerdict::new(VerdictTag::InAlphaDecidedMonomial, Evidence::Polyhedron { lambda })
                        } else {
                            MembershipVerdict::new(VerdictTag::NotInAlphaRefuted, Evidence::Arc(d.arc.unwrap()))
                        });
                    }
                    Err(Error::Unsupported(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let seed = match self.alpha_seed(id, q) {
                Ok(s) => s,
                Err(Error::Undecided { degree, .. }) => {
                    return Ok(MembershipVerdict::unknown(format!("seed sweep undecided in degree {:?}", degree)))
                }
                Err(e) => return Err(e),
            };
            let module = OModule::new(model.clone(), q, seed.gens.clone())?;
            if let Some(c) = module.membership(&omega)? {
                return Ok(MembershipVerdict::new(VerdictTag::InAlphaCertified, witness(&model, "alpha-seed", c)));
            }
            for arc in stock_arcs(pm, REFUTE_WEIGHT, true) {
                if refute_by_arc(&model, &omega, &model.omega_gens(q)?, &arc)?.refuted {
                    return Ok(MembershipVerdict::new(VerdictTag::NotInAlphaRefuted, Evidence::Arc(arc)));
                }
            }
            return Ok(MembershipVerdict::unknown("no refuting stock arc"));
        }
        match self.alpha_seed(id, q) {
            Ok(seed) => {
                let module = OModule::new(model.clone(), q, seed.gens.clone())?;
                if let Some(c) = module.membership(&omega)? {
                    return Ok(MembershipVerdict::new(VerdictTag::InAlphaCertified, witness(&model, "alpha-seed", c))
                        .note(format!("declared seed ({})", seed.source)));
                }
            }
            Err(Error::MissingSeed { .. }) => {}
            Err(e) => return Err(e),
        }
        self.refute_by_pullback(&model, &omega, |e, src, u| e.classify_alpha(src, u, None).map(|v| v.tag.in_alpha()))
    }

    /// Try each registered map into the variety; a pulled-back form that is provably
    /// outside the source's set refutes ω (the sets are functorial).
    fn refute_by_pullback<F>(&self, model: &Arc<Model>, omega: &DiffForm, inner: F) -> Result<MembershipVerdict>
    where
        F: Fn(&Engine, &str, &DiffForm) -> Result<Option<bool>>,
    {
        let amb = model.to_ambient(omega)?;
        for map_id in maps_into(&model.spec().id) {
            let m = self.reg.map(&map_id)?;
            let src = self.model(&m.source)?;
            if omega.degree() > src.dim() {
                continue;
            }
            let pb = src.to_work(&self.reg.pullback(&m, &amb)?)?;
            if src.is_zero(&pb) {
                continue;
            }
            if inner(self, &m.source, &pb)? == Some(false) {
                let v = self.classify_alpha(&m.source, &pb, None).unwrap_or_else(|_| MembershipVerdict::unknown("inner"));
                let inner_v = if v.tag == VerdictTag::NotInAlphaRefuted { v } else { MembershipVerdict::new(VerdictTag::NotInAlphaRefuted, Evidence::None) };
                return Ok(MembershipVerdict::new(
                    VerdictTag::NotInAlphaRefuted,
                    Evidence::Pullback { map: map_id, form: src.print(&pb), inner: Box::new(inner_v) },
                ));
            }
        }
        Ok(MembershipVerdict::unknown("no certificate, declared seed or refuting pullback"))
    }

    fn classify_product(&self, model: &Arc<Model>, omega: &DiffForm) -> Result<MembershipVerdict> {
        let info = model.spec().product.clone().unwrap();
        let factor = self.model(&info.factor)?;
        let mut parts = Vec::new();
        let mut all_in = true;
        let mut refuted = false;
        for ((j, dv), piece) in product_parts(omega) {
            let v = self.classify_alpha(&factor.spec().id, &piece, None)?;
            let label = format!("{}^{}{}: {}", info.disc, j, if dv { " with d".to_string() + &info.disc } else { String::new() }, factor.print(&piece));
            match v.tag.in_alpha() {
                Some(true) => {}
                Some(false) => refuted = true,
                None => all_in = false,
            }
            parts.push((label, v));
            if refuted {
                break;
            }
        }
        let tag = if refuted {
            VerdictTag::NotInAlphaRefuted
        } else if all_in {
            VerdictTag::InAlphaCertified
        } else {
            VerdictTag::Unknown
        };
        Ok(MembershipVerdict::new(tag, Evidence::ProductRule { parts }))
    }

    /// Membership in β^q (levels up to stabilization): Some(p) with the first level
    /// containing ω, Some(None) for a proof of non-membership, None when unknown.
    fn beta_membership(&self, model: &Arc<Model>, omega: &DiffForm, cap: Option<usize>) -> Result<Option<Option<usize>>> {
        let id = model.spec().id.clone();
        let q = omega.degree();
        let tower = match self.tower(&id, cap) {
            Ok(t) => t,
            Err(Error::MissingSeed { .. }) | Err(Error::Undecided { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let top = tower.levels.len() - 1;
        for p in 0..=top {
            let set = tower.level(q, p)?;
            if OModule::new(model.clone(), q, set.gens.clone())?.contains(omega)? {
                return Ok(Some(Some(p)));
            }
        }
        if tower.p_star(q).is_none() {
            return Ok(None);
        }
        if model.is_param() {
            return Ok(Some(None));
        }
        // declared seeds may be incomplete: only a pullback refutation counts
        let amb = model.to_ambient(omega)?;
        for map_id in maps_into(&id) {
            let m = self.reg.map(&map_id)?;
            let src = self.model(&m.source)?;
            if q > src.dim() {
                continue;
            }
            let pb = src.to_work(&self.reg.pullback(&m, &amb)?)?;
            if let Some(None) = self.beta_membership(&src, &pb, None)? {
                return Ok(Some(None));
            }
        }
        Ok(None)
    }

    fn l_membership(&self, model: &Arc<Model>, omega: &DiffForm) -> Result<Option<bool>> {
        let id = model.spec().id.clone();
        let q = omega.degree();
        match self.l_seed(&id, q) {
            Ok(Some(set)) => {
                if OModule::new(model.clone(), q, set.gens.clone())?.contains(omega)? {
                    return Ok(Some(true));
                }
                if model.is_param() {
                    return Ok(Some(false));
                }
            }
            Ok(None) | Err(Error::Undecided { .. }) => {}
            Err(e) => return Err(e),
        }
        let amb = model.to_ambient(omega)?;
        for map_id in maps_into(&id) {
            let m = self.reg.map(&map_id)?;
            let src = self.model(&m.source)?;
            if q > src.dim() {
                continue;
            }
            let pb = src.to_work(&self.reg.pullback(&m, &amb)?)?;
            if self.l_membership(&src, &pb)? == Some(false) {
                return Ok(Some(false));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rung {
    Omega,
    Alpha,
    AlphaLevel,
    Beta,
    L,
}

impl Rung {
    pub fn name(&self) -> &'static str {
        match self {
            Rung::Omega => "omega",
            Rung::Alpha => "alpha",
            Rung::AlphaLevel => "alpha-level",
            Rung::Beta => "beta",
            Rung::L => "L",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RungResult {
    pub rung: Rung,
    pub answer: Option<bool>,
    pub evidence: Value,
}

/// The ladder Ω ⊂ α ⊂ α[p] ⊂ β ⊂ L for one form.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub variety: String,
    pub form: String,
    pub degree: usize,
    pub rungs: Vec<RungResult>,
    /// Smallest p with ω ∈ α[p], when known.
    pub level: Option<usize>,
    pub alpha: MembershipVerdict,
}

impl ClassificationReport {
    pub fn answer(&self, r: Rung) -> Option<bool> {
        self.rungs.iter().find(|x| x.rung == r).and_then(|x| x.answer)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variety": self.variety,
            "form": self.form,
            "degree": self.degree,
            "level": self.level,
            "rungs": self.rungs.iter().map(|r| json!({
                "rung": r.rung.name(),
                "answer": r.answer,
                "evidence": r.evidence,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn table(&self) -> String {
        let mut s = format!("{} on {} (degree {})\n", self.form, self.variety, self.degree);
        for r in &self.rungs {
            let a = match r.answer {
                Some(true) => "yes",
                Some(false) => "no",
                None => "unknown",
            };
            let extra = if r.rung == Rung::AlphaLevel { self.level.map(|p| format!(" (p = {})", p)).unwrap_or_default() } else { String::new() };
            s.push_str(&format!("  {:<12} {}{}\n", r.rung.name(), a, extra));
        }
        s
    }
}

pub fn classify(engine: &Engine, id: &str, omega: &DiffForm, cert: Option<&DependenceCertificate>, cap: Option<usize>) -> Result<ClassificationReport> {
    let model = engine.model(id)?;
    let omega = work(&model, omega)?;
    let q = omega.degree();
    let om = engine.omega(id, q)?;
    let in_omega = om.membership(&omega)?;
    let alpha = engine.classify_alpha(id, &omega, cert)?;
    let beta = engine.beta_membership(&model, &omega, cap)?;
    let l = engine.l_membership(&model, &omega)?;

    let mut ans = [
        Some(in_omega.is_some()),
        alpha.tag.in_alpha(),
        None,
        beta.map(|b| b.is_some()),
        l,
    ];
    let level = match beta {
        Some(Some(p)) => Some(if alpha.tag.in_alpha() == Some(true) { 0 } else { p }),
        _ if alpha.tag.in_alpha() == Some(true) => Some(0),
        _ => None,
    };
    ans[2] = level.map(|_| true).or(if beta == Some(None) { Some(false) } else { None });
    // monotone propagation, then a consistency check
    for i in 0..ans.len() {
        if ans[i] == Some(true) {
            for a in ans.iter_mut().skip(i + 1) {
                if a.is_none() {
                    *a = Some(true);
                }
            }
        }
    }
    for i in (0..ans.len()).rev() {
        if ans[i] == Some(false) {
            for a in ans.iter_mut().take(i) {
                if a.is_none() {
                    *a = Some(false);
                }
            }
        }
    }
    for i in 0..ans.len() {
        for j in i + 1..ans.len() {
            if ans[i] == Some(true) && ans[j] == Some(false) {
                return Err(Error::OracleDisagreement(format!("ladder is not monotone for {} on {}", model.print(&omega), id)));
            }
        }
    }
    let level = if ans[1] == Some(true) { Some(0) } else { level };
    let rungs = vec![
        RungResult {
            rung: Rung::Omega,
            answer: ans[0],
            evidence: match &in_omega {
                Some(c) => json!({"coefficients": c.iter().map(|p| crate::parse::print_poly(p, &model.spec().vars)).collect::<Vec<_>>()}),
                None => Value::Null,
            },
        },
        RungResult { rung: Rung::Alpha, answer: ans[1], evidence: alpha.to_json() },
        RungResult { rung: Rung::AlphaLevel, answer: ans[2], evidence: json!({"level": level}) },
        RungResult {
            rung: Rung::Beta,
            answer: ans[3],
            evidence: json!({"first_level": beta.flatten(), "decided": beta.is_some()}),
        },
        RungResult { rung: Rung::L, answer: ans[4], evidence: json!({"decided": l.is_some()}) },
    ];
    Ok(ClassificationReport { variety: model.spec().id.clone(), form: model.print(&model.to_ambient(&omega)?), degree: q, rungs, level, alpha })
}
