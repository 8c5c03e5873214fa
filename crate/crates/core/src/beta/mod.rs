//! Filtration levels α^q[p], their stabilization β^q, the classification ladder,
//! and pull-back compatibility checks.

mod classify;
mod levels;
mod pullback;

pub use classify::{classify, ClassificationReport, Rung, RungResult};
pub use levels::{BetaResult, LevelTower};
pub use pullback::{check_functoriality, check_pullback_levels, FunctorialityReport, PullbackCheck, PullbackReport};

use crate::closure::{seed_sweep, SeedKind, SeedOrigin};
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::variety::{Model, OModule, Registry};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Omega(usize),
    /// Seed generator with a short description of how it was obtained.
    Seed(String),
    /// Carried over from the previous level.
    Kept(usize),
    /// g_i ∧ h_j with g of degree r.
    Wedge { r: usize, i: usize, j: usize },
    /// g_i ∧ d h_j with g of degree r.
    WedgeD { r: usize, i: usize, j: usize },
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::Omega(i) => format!("omega({})", i),
            Provenance::Seed(s) => format!("alpha-seed({})", s),
            Provenance::Kept(i) => format!("kept({})", i),
            Provenance::Wedge { r, i, j } => format!("wedge(r={},{},{})", r, i, j),
            Provenance::WedgeD { r, i, j } => format!("g^dg(r={},{},{})", r, i, j),
        }
    }
}

/// Generators of α^q[p] (or a seed / L set) as an O-module.
#[derive(Clone, Debug)]
pub struct GradedGeneratorSet {
    pub variety: String,
    pub q: usize,
    pub level: usize,
    /// `computed` for cover sweeps, the table tag for declared seeds.
    pub source: String,
    pub gens: Vec<DiffForm>,
    pub provenance: Vec<Provenance>,
}

impl GradedGeneratorSet {
    pub fn module(&self, model: &Arc<Model>) -> Result<OModule> {
        OModule::new(model.clone(), self.q, self.gens.clone())
    }

    pub fn to_json(&self, model: &Model) -> Value {
        json!({
            "variety": self.variety,
            "degree": self.q,
            "level": self.level,
            "source": self.source,
            "generators": self.gens.iter().zip(&self.provenance).map(|(g, p)| json!({
                "form": model.print(g),
                "provenance": p.describe(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Registry plus caches of seeds and level towers.
pub struct Engine {
    pub reg: Registry,
    seeds: Mutex<HashMap<(String, usize, SeedKind), Arc<GradedGeneratorSet>>>,
    towers: Mutex<HashMap<(String, usize), Arc<LevelTower>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Registry::new())
    }
}

impl Engine {
    pub fn new(reg: Registry) -> Self {
        Engine { reg, seeds: Mutex::new(HashMap::new()), towers: Mutex::new(HashMap::new()) }
    }

    pub fn model(&self, id: &str) -> Result<Arc<Model>> {
        self.reg.model(id)
    }

    pub fn omega(&self, id: &str, q: usize) -> Result<OModule> {
        let m = self.model(id)?;
        OModule::new(m.clone(), q, m.omega_gens(q)?)
    }

    /// α^q seed (level 0).
    pub fn alpha_seed(&self, id: &str, q: usize) -> Result<Arc<GradedGeneratorSet>> {
        self.seed(id, q, SeedKind::Alpha)
    }

    /// Generators of L^q: computed on covers, declared otherwise (None when absent).
    pub fn l_seed(&self, id: &str, q: usize) -> Result<Option<Arc<GradedGeneratorSet>>> {
        match self.seed(id, q, SeedKind::L) {
            Ok(s) => Ok(Some(s)),
            Err(Error::MissingSeed { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn seed(&self, id: &str, q: usize, kind: SeedKind) -> Result<Arc<GradedGeneratorSet>> {
        let model = self.model(id)?;
        let vid = model.spec().id.clone();
        if q > model.dim() {
            return Err(Error::DegreeTooLarge { degree: q, dim: model.dim() });
        }
        let key = (vid.clone(), q, kind);
        if let Some(s) = self.seeds.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let set = if model.spec().product.is_some() {
            self.product_seed(&model, q, kind)?
        } else if model.is_param() {
            let s = seed_sweep(&model, q, kind)?;
            let provenance = s
                .origins
                .iter()
                .map(|o| match o {
                    SeedOrigin::Omega(i) => Provenance::Omega(*i),
                    SeedOrigin::Holomorphic(d) => Provenance::Seed(format!("holomorphic {:?}", d)),
                    SeedOrigin::Polyhedron(d) => Provenance::Seed(format!("polyhedron {:?}", d)),
                    SeedOrigin::Certificate(d, c) => Provenance::Seed(format!("certificate {:?} degree {}", d, c.degree)),
                })
                .collect();
            GradedGeneratorSet { variety: vid.clone(), q, level: 0, source: "computed".into(), gens: s.gens, provenance }
        } else {
            self.declared_seed(&model, q, kind)?
        };
        let set = Arc::new(set);
        self.seeds.lock().unwrap().insert(key, set.clone());
        Ok(set)
    }

    /// Product rule: α^q(A×D) = α^q(A) + α^{q-1}(A)∧dv, and likewise for L.
    fn product_seed(&self, model: &Arc<Model>, q: usize, kind: SeedKind) -> Result<GradedGeneratorSet> {
        let spec = model.spec();
        let info = spec.product.as_ref().unwrap();
        let factor = self.model(&info.factor)?;
        let n = match model.work_coords() {
            Coords::Parameter => model.param().unwrap().s,
            Coords::Ambient => spec.nvars(),
        };
        let embed = |u: &DiffForm| -> DiffForm {
            let map: Vec<usize> = (0..u.nvars()).collect();
            u.remap(n, &map)
        };
        let dv = model.to_work(&DiffForm::differential(spec.nvars(), spec.nvars() - 1, Coords::Ambient))?;
        let mut gens = Vec::new();
        let mut provenance = Vec::new();
        if q <= factor.dim() {
            let s = self.seed(&factor.spec().id, q, kind)?;
            for (i, g) in s.gens.iter().enumerate() {
                gens.push(embed(g));
                provenance.push(Provenance::Seed(format!("factor degree {} #{}", q, i)));
            }
        }
        if q >= 1 && q - 1 <= factor.dim() {
            let s = self.seed(&factor.spec().id, q - 1, kind)?;
            for (i, g) in s.gens.iter().enumerate() {
                gens.push(model.wedge(&embed(g), &dv)?);
                provenance.push(Provenance::Seed(format!("factor degree {} #{} ^ d{}", q - 1, i, info.disc)));
            }
        }
        Ok(GradedGeneratorSet { variety: spec.id.clone(), q, level: 0, source: "product-rule".into(), gens, provenance })
    }

    /// Ambient varieties: Ω^q, the declared forms, and wedges of lower declared seeds.
    fn declared_seed(&self, model: &Arc<Model>, q: usize, kind: SeedKind) -> Result<GradedGeneratorSet> {
        let spec = model.spec();
        let table = match kind {
            SeedKind::Alpha => spec.alpha_seeds.as_ref(),
            SeedKind::L => spec.l_presentation.as_ref(),
        };
        let Some(table) = table else {
            return Err(Error::MissingSeed { variety: spec.id.clone(), q });
        };
        let omega = model.omega_gens(q)?;
        let mut gens = Vec::new();
        let mut provenance = Vec::new();
        let mut module = OModule::new(model.clone(), q, Vec::new())?;
        let mut offer = |g: DiffForm, p: Provenance, gens: &mut Vec<DiffForm>, provenance: &mut Vec<Provenance>| -> Result<()> {
            if model.is_zero(&g) || module.contains(&g)? {
                return Ok(());
            }
            gens.push(g);
            provenance.push(p);
            module = OModule::new(model.clone(), q, gens.clone())?;
            Ok(())
        };
        for (i, g) in omega.into_iter().enumerate() {
            offer(g, Provenance::Omega(i), &mut gens, &mut provenance)?;
        }
        if q == 0 && !spec.normal && !table.forms.contains_key(&0) {
            return Err(Error::MissingSeed { variety: spec.id.clone(), q });
        }
        for text in table.forms.get(&q).into_iter().flatten() {
            let g = model.parse(text)?;
            offer(g, Provenance::Seed(format!("{}: {}", table.source, text)), &mut gens, &mut provenance)?;
        }
        if kind == SeedKind::Alpha {
            for r in 1..q {
                if r > q - r {
                    break;
                }
                let a = self.seed(&spec.id, r, kind)?;
                let b = self.seed(&spec.id, q - r, kind)?;
                for (i, x) in a.gens.iter().enumerate() {
                    for (j, y) in b.gens.iter().enumerate() {
                        if r == q - r && j < i {
                            continue;
                        }
                        offer(model.wedge(x, y)?, Provenance::Wedge { r, i, j }, &mut gens, &mut provenance)?;
                    }
                }
            }
        }
        Ok(GradedGeneratorSet { variety: spec.id.clone(), q, level: 0, source: table.source.clone(), gens, provenance })
    }

    /// Level tower up to the given cap (default dim + 2).
    pub fn tower(&self, id: &str, cap: Option<usize>) -> Result<Arc<LevelTower>> {
        let model = self.model(id)?;
        let cap = cap.unwrap_or(model.dim() + 2);
        let key = (model.spec().id.clone(), cap);
        if let Some(t) = self.towers.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(LevelTower::build(self, &model, cap)?);
        self.towers.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    pub fn alpha_level(&self, id: &str, q: usize, p: usize) -> Result<Arc<GradedGeneratorSet>> {
        let t = self.tower(id, None)?;
        t.level(q, p)
    }

    /// β^q with its stabilization level; checks the bounds p* ≤ q and, for normal
    /// varieties with q ≥ 1, p* ≤ q - 1.
    pub fn beta(&self, id: &str, q: usize, cap: Option<usize>) -> Result<BetaResult> {
        let model = self.model(id)?;
        let cap = cap.unwrap_or(q + 2);
        let tower = self.tower(id, Some(cap.max(model.dim() + 2)))?;
        tower.beta(q, cap, model.spec().normal)
    }
}
