use super::{builtin, builtin_map, Model, VarietySpec};
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm, MapSpec};
use crate::poly::Rational;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Built-ins plus file-registered varieties, with cached working models.
#[derive(Default)]
pub struct Registry {
    custom: BTreeMap<String, VarietySpec>,
    models: Mutex<BTreeMap<String, Arc<Model>>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: VarietySpec) -> Result<()> {
        spec.validate()?;
        self.custom.insert(spec.id.clone(), spec);
        Ok(())
    }

    pub fn variety(&self, id: &str) -> Result<VarietySpec> {
        if let Some(s) = self.custom.get(id.trim()) {
            return Ok(s.clone());
        }
        builtin(id)
    }

    pub fn model(&self, id: &str) -> Result<Arc<Model>> {
        let spec = self.variety(id)?;
        let mut g = self.models.lock().unwrap();
        if let Some(m) = g.get(&spec.id) {
            return Ok(m.clone());
        }
        let m = Arc::new(Model::new(&spec)?);
        g.insert(spec.id.clone(), m.clone());
        Ok(m)
    }

    pub fn map(&self, id: &str) -> Result<MapSpec> {
        let m = builtin_map(id)?;
        self.validate_map(&m)?;
        Ok(m)
    }

    pub fn validate_map(&self, m: &MapSpec) -> Result<()> {
        let src = self.variety(&m.source)?;
        let tgt = self.variety(&m.target)?;
        if m.components.len() != tgt.nvars() {
            return Err(Error::InvalidMap(format!("{} has {} components, target needs {}", m.id, m.components.len(), tgt.nvars())));
        }
        if m.components.iter().any(|c| c.nvars() != src.nvars()) {
            return Err(Error::InvalidMap(format!("{}: components not in source coordinates", m.id)));
        }
        let ideal = src.ideal();
        for f in &tgt.equations {
            if !ideal.contains(&f.compose(&m.components)) {
                return Err(Error::InvalidMap(format!(
                    "{}: target equation {} does not pull back into the source ideal",
                    m.id,
                    crate::parse::print_poly(f, &tgt.vars)
                )));
            }
        }
        let pt = &m.witness.point;
        if pt.len() != src.nvars() || src.equations.iter().any(|f| f.eval(pt) != Rational::from_integer(0.into())) {
            return Err(Error::InvalidMap(format!("{}: witness is not a point of {}", m.id, src.id)));
        }
        let img: Vec<Rational> = m.components.iter().map(|c| c.eval(pt)).collect();
        if tgt.singular.iter().all(|g| g.eval(&img) == Rational::from_integer(0.into())) {
            return Err(Error::InvalidMap(format!("{}: witness image lies in the singular locus of {}", m.id, tgt.id)));
        }
        Ok(())
    }

    /// Pull back an ambient form on the target to ambient coordinates on the source.
    pub fn pullback(&self, m: &MapSpec, u: &DiffForm) -> Result<DiffForm> {
        let src = self.variety(&m.source)?;
        let tgt = self.variety(&m.target)?;
        let u = match u.coords() {
            Coords::Ambient => u.clone(),
            Coords::Parameter => self.model(&tgt.id)?.to_ambient(u)?,
        };
        if u.nvars() != tgt.nvars() {
            return Err(Error::CoordMismatch(format!("form has {} variables, {} has {}", u.nvars(), tgt.id, tgt.nvars())));
        }
        u.substitute(&m.components, src.nvars(), Coords::Ambient, None)
    }
}
