//! Integral dependence certificates P(z) = z^k + Σ S_h z^{k-h}.
//!
//! File format (TOML):
//!
//! ```toml
//! variety = "S(4)"
//! form = "x*dy/z^2"
//! degree = 2
//! # pullback = "f(4)"   verify f*(form) on the source instead
//! # scale = "1/8"       and then c·f*(form), with S_h scaled by c^h
//!
//! [bindings]            # names for elements of Ω^q/torsion
//! dz = "dz"
//! dx = "dx"
//! dy = "dy"
//!
//! [[term]]              # S_h = Σ coeff · Π gens over the terms with this h
//! h = 1
//! coeff = "-4*z"
//! gens = ["dz"]
//!
//! [[term]]
//! h = 2
//! coeff = "1"
//! gens = ["dx", "dy"]
//! ```

use super::sym::SymElem;
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::mero::MeroFunction;
use crate::parse::{parse_poly, parse_rational};
use crate::poly::{fmt_rational, Rational};
use crate::variety::{Model, OModule, Registry};
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertTerm {
    pub h: usize,
    pub coeff: String,
    pub gens: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependenceCertificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub variety: String,
    pub form: String,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    #[serde(default, rename = "term")]
    pub terms: Vec<CertTerm>,
}

impl DependenceCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "variety": self.variety,
            "form": self.form,
            "degree": self.degree,
            "pullback": self.pullback,
            "scale": self.scale,
            "bindings": self.bindings,
            "terms": self.terms.iter().map(|t| json!({"h": t.h, "coeff": t.coeff, "gens": t.gens})).collect::<Vec<_>>(),
        })
    }
}

pub fn load_certificate_str(text: &str, file: &str) -> Result<DependenceCertificate> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
        let msg = e.message().to_string();
        let field = msg.split('`').nth(1).unwrap_or("").to_string();
        Error::Schema { file: file.into(), line, field, msg }
    })
}

/// Load a certificate whose strings contain `{expr}` placeholders (k, m, n, p).
pub fn load_certificate_template(text: &str, file: &str, vars: &BTreeMap<String, i64>) -> Result<DependenceCertificate> {
    let mut c = load_certificate_str(text, file)?;
    let inst = |s: &str| super::template::instantiate(s, vars);
    c.variety = inst(&c.variety)?;
    c.form = inst(&c.form)?;
    c.pullback = c.pullback.as_deref().map(inst).transpose()?;
    c.scale = c.scale.as_deref().map(inst).transpose()?;
    for v in c.bindings.values_mut() {
        *v = inst(v)?;
    }
    for t in c.terms.iter_mut() {
        t.coeff = inst(&t.coeff)?;
    }
    Ok(c)
}

pub fn save_certificate(c: &DependenceCertificate) -> String {
    toml::to_string(c).expect("certificate serializes")
}

/// Result of checking a certificate; `reason` explains a rejection.
#[derive(Clone, Debug, PartialEq)]
pub struct CertCheck {
    pub valid: bool,
    pub reason: Option<String>,
}

impl CertCheck {
    fn reject(r: impl Into<String>) -> Self {
        CertCheck { valid: false, reason: Some(r.into()) }
    }
}

/// Check that every S_h lies in Sym^h(Ω^q/torsion) and that P(ω) = 0 in the
/// generic model (after the optional pullback and scaling).
pub fn verify_certificate(reg: &Registry, cert: &DependenceCertificate) -> Result<CertCheck> {
    let target = reg.variety(&cert.variety)?;
    let ty = reg.model(&target.id)?;
    let omega_t = target.parse(&cert.form)?;
    let q = omega_t.degree();
    let k = cert.degree;
    if k == 0 {
        return Err(Error::DegreeMismatch("certificate degree must be at least 1".into()));
    }
    for t in &cert.terms {
        if t.h == 0 || t.h > k {
            return Err(Error::DegreeMismatch(format!("term with h = {} in a degree-{} certificate", t.h, k)));
        }
        if t.gens.len() != t.h {
            return Err(Error::DegreeMismatch(format!("S_{} term lists {} generators", t.h, t.gens.len())));
        }
        for g in &t.gens {
            if !cert.bindings.contains_key(g) {
                return Err(Error::Unresolved(g.clone()));
            }
        }
    }
    // bindings must be Ω^q/torsion elements of the target
    let omega_mod = OModule::new(ty.clone(), q, ty.omega_gens(q)?)?;
    let mut bound: BTreeMap<String, DiffForm> = BTreeMap::new();
    for (name, text) in &cert.bindings {
        let b = target.parse(text)?;
        if b.degree() != q {
            return Err(Error::DegreeMismatch(format!("binding {} has degree {}, form has degree {}", name, b.degree(), q)));
        }
        if !omega_mod.contains(&ty.to_work(&b)?)? {
            return Ok(CertCheck::reject(format!("binding {} = {} is not in Ω^{}/torsion", name, text, q)));
        }
        bound.insert(name.clone(), b);
    }
    // transport to the model where P(ω) is evaluated
    let (model, map): (Arc<Model>, _) = match &cert.pullback {
        Some(id) => {
            let m = reg.map(id)?;
            if reg.variety(&m.target)?.id != target.id {
                return Err(Error::InvalidMap(format!("{} does not map to {}", id, target.id)));
            }
            (reg.model(&m.source)?, Some(m))
        }
        None => (ty.clone(), None),
    };
    let transport = |u: &DiffForm| -> Result<DiffForm> {
        match &map {
            Some(m) => model.to_work(&reg.pullback(m, u)?),
            None => model.to_work(u),
        }
    };
    let scale = match &cert.scale {
        Some(s) => parse_rational(s)?,
        None => Rational::one(),
    };
    let omega = transport(&omega_t)?.scale(&scale);
    let npos = model.positions(q).len();
    let nv = omega.nvars();
    let w = SymElem::from_form(&model, &omega)?;
    let mut gens_sym: BTreeMap<String, SymElem> = BTreeMap::new();
    for (name, b) in &bound {
        gens_sym.insert(name.clone(), SymElem::from_form(&model, &transport(b)?)?);
    }
    let mut total = w.pow(k, &model);
    for t in &cert.terms {
        let c = parse_poly(&t.coeff, &target.vars)?;
        let cf = transport(&DiffForm::poly(c, Coords::Ambient))?.component(&[]);
        let cf: MeroFunction = cf.scale(&num_traits::pow(scale.clone(), t.h));
        let mut term = SymElem::scalar(cf, npos);
        if term.terms.is_empty() {
            continue;
        }
        for g in &t.gens {
            term = term.mul(&gens_sym[g], &model);
        }
        term = term.mul(&w.pow(k - t.h, &model), &model);
        total = total.add(&term, &model);
    }
    let _ = nv;
    if total.is_zero(&model) {
        Ok(CertCheck { valid: true, reason: None })
    } else {
        Ok(CertCheck::reject(format!("P(ω) does not vanish ({} non-zero coefficients)", total.terms.len())))
    }
}

/// Display helper for generated certificates.
pub(crate) fn rational_string(r: &Rational) -> String {
    fmt_rational(r)
}
