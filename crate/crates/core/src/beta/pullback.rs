use super::Engine;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::variety::OModule;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct PullbackCheck {
    pub q: usize,
    pub p: usize,
    pub generator: String,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub map: String,
    pub source: String,
    pub target: String,
    pub levels: Vec<PullbackCheck>,
    /// f*(g∧h) = f*g ∧ f*h on generator pairs.
    pub wedge_ok: bool,
    /// f*(dg) = d f*g on generators.
    pub d_ok: bool,
    pub notes: Vec<String>,
}

impl PullbackReport {
    pub fn ok(&self) -> bool {
        self.wedge_ok && self.d_ok && self.levels.iter().all(|c| c.ok)
    }

    /// First generator whose pullback leaves the corresponding level.
    pub fn offending(&self) -> Option<&PullbackCheck> {
        self.levels.iter().find(|c| !c.ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "map": self.map,
            "source": self.source,
            "target": self.target,
            "ok": self.ok(),
            "wedge_commutes": self.wedge_ok,
            "d_commutes": self.d_ok,
            "checked": self.levels.len(),
            "offending": self.offending().map(|c| json!({"degree": c.q, "level": c.p, "generator": c.generator})),
            "notes": self.notes,
        })
    }
}

/// f*(α^q_target[p]) ⊂ α^q_source[p] generator by generator, for p in `levels` and
/// every q up to the smaller dimension.
pub fn check_pullback_levels(engine: &Engine, map_id: &str, levels: std::ops::RangeInclusive<usize>) -> Result<PullbackReport> {
    let reg = &engine.reg;
    let m = reg.map(map_id)?;
    let src = engine.model(&m.source)?;
    let tgt = engine.model(&m.target)?;
    let qmax = src.dim().min(tgt.dim());
    let ttower = engine.tower(&m.target, None)?;
    let stower = engine.tower(&m.source, None)?;
    let pull = |u: &DiffForm| -> Result<DiffForm> { src.to_work(&reg.pullback(&m, &tgt.to_ambient(u)?)?) };
    let mut checks = Vec::new();
    let mut all_gens: Vec<Vec<DiffForm>> = vec![Vec::new(); tgt.dim() + 1];
    for p in levels {
        for q in 0..=tgt.dim() {
            let tset = ttower.level(q, p)?;
            for g in &tset.gens {
                if !all_gens[q].iter().any(|h| tgt.equal(h, g)) {
                    all_gens[q].push(g.clone());
                }
            }
            if q > qmax {
                continue;
            }
            let smod = OModule::new(src.clone(), q, stower.level(q, p)?.gens.clone())?;
            for g in &tset.gens {
                let pb = pull(g)?;
                let ok = src.is_zero(&pb) || smod.contains(&pb)?;
                checks.push(PullbackCheck { q, p, generator: tgt.print(&tgt.to_ambient(g)?), ok });
            }
        }
    }
    let mut wedge_ok = true;
    let mut d_ok = true;
    for q in 0..=tgt.dim() {
        for g in &all_gens[q] {
            if q < tgt.dim() && q < src.dim() {
                let dg = tgt.d(g)?;
                if !src.equal(&pull(&dg)?, &src.d(&pull(g)?)?) {
                    d_ok = false;
                }
            }
            for r in 1..=src.dim().min(tgt.dim()).saturating_sub(q) {
                for h in all_gens[r].iter().take(4) {
                    let gh = tgt.wedge(g, h)?;
                    if !src.equal(&pull(&gh)?, &src.wedge(&pull(g)?, &pull(h)?)?) {
                        wedge_ok = false;
                    }
                }
            }
        }
    }
    Ok(PullbackReport {
        map: m.id.clone(),
        source: m.source.clone(),
        target: m.target.clone(),
        levels: checks,
        wedge_ok,
        d_ok,
        notes: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct FunctorialityReport {
    pub outer: String,
    pub inner: String,
    pub checked: usize,
    pub ok: bool,
}

impl FunctorialityReport {
    pub fn to_json(&self) -> Value {
        json!({"outer": self.outer, "inner": self.inner, "checked": self.checked, "ok": self.ok})
    }
}

/// (g∘f)* = f*∘g* on Ω generators and level-0 α generators of g's target.
pub fn check_functoriality(engine: &Engine, outer: &str, inner: &str) -> Result<FunctorialityReport> {
    let reg = &engine.reg;
    let g = reg.map(outer)?;
    let f = reg.map(inner)?;
    let gf = reg.map(&format!("compose({},{})", outer, inner))?;
    if reg.variety(&f.target)?.id != reg.variety(&g.source)?.id {
        return Err(Error::InvalidMap(format!("{} does not land in the source of {}", inner, outer)));
    }
    let tgt = engine.model(&g.target)?;
    let src = engine.model(&f.source)?;
    let mut checked = 0;
    let mut ok = true;
    for q in 0..=tgt.dim().min(src.dim()) {
        let mut gens = tgt.omega_gens(q)?;
        if let Ok(s) = engine.alpha_seed(&g.target, q) {
            gens.extend(s.gens.iter().cloned());
        }
        for u in gens {
            let a = tgt.to_ambient(&u)?;
            let lhs = reg.pullback(&gf, &a)?;
            let rhs = reg.pullback(&f, &reg.pullback(&g, &a)?)?;
            if !src.equal(&src.to_work(&lhs)?, &src.to_work(&rhs)?) {
                ok = false;
            }
            checked += 1;
        }
    }
    Ok(FunctorialityReport { outer: outer.into(), inner: inner.into(), checked, ok })
}
