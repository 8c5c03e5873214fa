use super::{Engine, GradedGeneratorSet, Provenance};
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::variety::{Model, OModule};
use serde_json::{json, Value};
use std::sync::Arc;

/// α^q[p] for all q ≤ dim and p up to stabilization or the cap.
#[derive(Debug)]
pub struct LevelTower {
    pub variety: String,
    pub cap: usize,
    /// levels[p][q]
    pub levels: Vec<Vec<Arc<GradedGeneratorSet>>>,
    /// changed[p][q]: level p of degree q differs from level p - 1 (false at p = 0).
    pub changed: Vec<Vec<bool>>,
}

#[derive(Clone, Debug)]
pub struct BetaResult {
    pub variety: String,
    pub q: usize,
    pub p_star: usize,
    pub cap: usize,
    pub beta: Arc<GradedGeneratorSet>,
    /// Number of generators at each level 0..=p*.
    pub sizes: Vec<usize>,
}

impl BetaResult {
    pub fn to_json(&self, model: &Model) -> Value {
        json!({
            "variety": self.variety,
            "degree": self.q,
            "p_star": self.p_star,
            "level_cap": self.cap,
            "level_sizes": self.sizes,
            "beta": self.beta.to_json(model),
        })
    }
}

impl LevelTower {
    pub(super) fn build(engine: &Engine, model: &Arc<Model>, cap: usize) -> Result<LevelTower> {
        let dim = model.dim();
        let id = model.spec().id.clone();
        let mut base = Vec::new();
        for q in 0..=dim {
            base.push(engine.alpha_seed(&id, q)?);
        }
        let mut levels = vec![base];
        let mut changed = vec![vec![false; dim + 1]];
        while levels.len() <= cap {
            let prev = levels.last().unwrap().clone();
            let mut next = Vec::new();
            let mut ch = Vec::new();
            for q in 0..=dim {
                let (set, c) = next_level(model, &prev, q)?;
                next.push(Arc::new(set));
                ch.push(c);
            }
            let any = ch.iter().any(|&c| c);
            levels.push(next);
            changed.push(ch);
            if !any {
                break;
            }
        }
        Ok(LevelTower { variety: id, cap, levels, changed })
    }

    /// First level p at which degrees 0..=q do not change when passing to p + 1.
    fn stable_from(&self, q: usize) -> Option<usize> {
        (1..self.levels.len()).find(|&p| self.changed[p][..=q].iter().all(|c| !c)).map(|p| p - 1)
    }

    pub fn p_star(&self, q: usize) -> Option<usize> {
        self.stable_from(q)?;
        let s = self.stable_from(q).unwrap();
        Some((0..=s).rev().find(|&p| self.changed[p][q]).unwrap_or(0))
    }

    pub fn level(&self, q: usize, p: usize) -> Result<Arc<GradedGeneratorSet>> {
        if q >= self.levels[0].len() {
            return Err(Error::DegreeTooLarge { degree: q, dim: self.levels[0].len() - 1 });
        }
        if p < self.levels.len() {
            return Ok(self.levels[p][q].clone());
        }
        match self.stable_from(q) {
            Some(s) => {
                let mut g = (*self.levels[s][q]).clone();
                g.level = p;
                Ok(Arc::new(g))
            }
            None => Err(Error::NoStabilization { variety: self.variety.clone(), q, cap: self.cap }),
        }
    }

    pub(super) fn beta(&self, q: usize, cap: usize, normal: bool) -> Result<BetaResult> {
        if q >= self.levels[0].len() {
            return Err(Error::DegreeTooLarge { degree: q, dim: self.levels[0].len() - 1 });
        }
        let no = || Error::NoStabilization { variety: self.variety.clone(), q, cap };
        let s = self.stable_from(q).ok_or_else(no)?;
        let p = self.p_star(q).unwrap();
        if p > cap {
            return Err(no());
        }
        if p > q {
            return Err(Error::StabilizationBound { variety: self.variety.clone(), q, p, bound: q });
        }
        if normal && q >= 1 && p > q - 1 {
            return Err(Error::StabilizationBound { variety: self.variety.clone(), q, p, bound: q - 1 });
        }
        Ok(BetaResult {
            variety: self.variety.clone(),
            q,
            p_star: p,
            cap,
            beta: self.levels[s][q].clone(),
            sizes: (0..=p).map(|i| self.levels[i][q].gens.len()).collect(),
        })
    }
}

/// α^q[p+1] from level p: keep α^q[p] and add g∧h and g∧dh, dropping anything
/// already in the module built so far.
fn next_level(model: &Arc<Model>, prev: &[Arc<GradedGeneratorSet>], q: usize) -> Result<(GradedGeneratorSet, bool)> {
    let cur = &prev[q];
    let mut gens: Vec<DiffForm> = cur.gens.clone();
    let mut provenance: Vec<Provenance> = (0..gens.len()).map(Provenance::Kept).collect();
    let mut module = OModule::new(model.clone(), q, gens.clone())?;
    let mut changed = false;
    let mut candidates: Vec<(DiffForm, Provenance)> = Vec::new();
    for r in 0..=q / 2 {
        let a = &prev[r];
        let b = &prev[q - r];
        for (i, g) in a.gens.iter().enumerate() {
            for (j, h) in b.gens.iter().enumerate() {
                if r == q - r && j < i {
                    continue;
                }
                candidates.push((model.wedge(g, h)?, Provenance::Wedge { r, i, j }));
            }
        }
    }
    for r in 0..q {
        let a = &prev[r];
        let b = &prev[q - r - 1];
        let dh: Vec<DiffForm> = b.gens.iter().map(|h| model.d(h)).collect::<Result<_>>()?;
        for (i, g) in a.gens.iter().enumerate() {
            for (j, h) in dh.iter().enumerate() {
                candidates.push((model.wedge(g, h)?, Provenance::WedgeD { r, i, j }));
            }
        }
    }
    for (c, p) in candidates {
        if model.is_zero(&c) || module.contains(&c)? {
            continue;
        }
        gens.push(c);
        provenance.push(p);
        module = OModule::new(model.clone(), q, gens.clone())?;
        changed = true;
    }
    Ok((
        GradedGeneratorSet { variety: cur.variety.clone(), q, level: cur.level + 1, source: cur.source.clone(), gens, provenance },
        changed,
    ))
}
