//! Registered singular spaces: built-ins, products, and file-defined varieties.

mod builtin;
mod io;
mod model;
mod registry;

pub use builtin::{builtin, builtin_map, fermat_to_s_map, generic_point, maps_into, product};
pub use io::{load_variety, load_variety_str, save_variety};
pub use model::{subsets, AmbientModel, Model, OModule, ParamModel};
pub use registry::Registry;

use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::parse::{parse_form, VarContext};
use crate::poly::{linalg::solve_dense, rat, Polynomial, Rational};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    pub params: Vec<String>,
    /// One polynomial in the parameters per ambient variable.
    pub components: Vec<Polynomial>,
}

/// Diagonal action t_j ↦ ζ^{w_j} t_j by a primitive root of unity of the given order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeckGroup {
    pub order: u32,
    pub weights: Vec<i64>,
}

impl DeckGroup {
    /// Character of a Laurent monomial t^e (dt_j counted with t_j).
    pub fn character(&self, e: &[i64]) -> i64 {
        let s: i64 = e.iter().zip(&self.weights).map(|(a, w)| a * w).sum();
        s.rem_euclid(self.order as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductInfo {
    pub factor: String,
    pub disc: String,
}

/// A form table with a provenance tag such as `declared` or `derived`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FormTable {
    pub source: String,
    pub forms: BTreeMap<usize, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    pub id: String,
    pub vars: Vec<String>,
    pub equations: Vec<Polynomial>,
    pub dim: usize,
    pub singular: Vec<Polynomial>,
    pub parametrization: Option<Parametrization>,
    pub deck: Option<DeckGroup>,
    pub normal: bool,
    pub poles: Vec<bool>,
    pub l_presentation: Option<FormTable>,
    pub alpha_seeds: Option<FormTable>,
    pub golden: BTreeMap<String, Vec<String>>,
    pub product: Option<ProductInfo>,
    pub notes: Vec<String>,
}

impl VarietySpec {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn ambient_ctx(&self) -> VarContext {
        VarContext::new(self.vars.clone(), Coords::Ambient, self.poles.clone())
    }

    pub fn param_ctx(&self) -> Option<VarContext> {
        self.parametrization.as_ref().map(|p| {
            let n = p.params.len();
            VarContext::new(p.params.clone(), Coords::Parameter, vec![true; n])
        })
    }

    pub fn names(&self, coords: Coords) -> Vec<String> {
        match coords {
            Coords::Ambient => self.vars.clone(),
            Coords::Parameter => self.parametrization.as_ref().map(|p| p.params.clone()).unwrap_or_default(),
        }
    }

    /// Parse in ambient coordinates, falling back to parameter coordinates.
    pub fn parse(&self, text: &str) -> Result<DiffForm> {
        match parse_form(text, &self.ambient_ctx()) {
            Ok(f) => Ok(f),
            Err(e) => match self.param_ctx() {
                Some(pc) => parse_form(text, &pc).map_err(|_| Error::Parse(e)),
                None => Err(Error::Parse(e)),
            },
        }
    }

    pub fn print(&self, u: &DiffForm) -> String {
        crate::parse::print_form(u, &self.names(u.coords()))
    }

    pub fn ideal(&self) -> crate::poly::IdealPresentation {
        crate::poly::IdealPresentation::new(self.equations.clone())
    }

    /// Jacobian ideal generators together with the equations.
    pub fn jacobian_ideal(&self) -> Vec<Polynomial> {
        let mut g = self.equations.clone();
        for f in &self.equations {
            for i in 0..self.nvars() {
                let d = f.derivative(i);
                if !d.is_zero() {
                    g.push(d);
                }
            }
        }
        g
    }

    pub fn validate(&self) -> Result<()> {
        for v in &self.vars {
            if v.starts_with('d') {
                return Err(Error::InvalidParameter(format!("variable '{}' starts with 'd'", v)));
            }
        }
        if self.poles.len() != self.nvars() {
            return Err(Error::InvalidParameter("pole flags do not match variables".into()));
        }
        if self.equations.len() > 1 {
            return Err(Error::Unsupported("only hypersurfaces and affine spaces are supported".into()));
        }
        if self.dim + self.equations.len() != self.nvars() {
            return Err(Error::InvalidParameter(format!("dimension {} inconsistent with {} variables", self.dim, self.nvars())));
        }
        if let Some(p) = &self.parametrization {
            for v in &p.params {
                if v.starts_with('d') {
                    return Err(Error::InvalidParameter(format!("parameter '{}' starts with 'd'", v)));
                }
            }
            if p.components.len() != self.nvars() {
                return Err(Error::InvalidParameter("parametrization arity".into()));
            }
            for f in &self.equations {
                let r = f.compose(&p.components);
                if !r.is_zero() {
                    let (f, r) = (crate::parse::print_poly(f, &self.vars), crate::parse::print_poly(&r, &p.params));
                    return Err(Error::InconsistentParametrization(format!("{} (residue {})", f, r)));
                }
            }
            if p.params.len() != self.dim {
                return Err(Error::InvalidParameter("parameter count must equal the dimension".into()));
            }
            if !self.generically_finite() {
                return Err(Error::InvalidParameter("parametrization is not generically finite".into()));
            }
            if let Some(d) = &self.deck {
                if d.weights.len() != p.params.len() {
                    return Err(Error::InvalidParameter("deck weights arity".into()));
                }
                // ambient coordinates must be invariant
                for c in &p.components {
                    for e in c.terms().keys() {
                        let e: Vec<i64> = e.iter().map(|&k| k as i64).collect();
                        if d.character(&e) != 0 {
                            return Err(Error::InvalidParameter("parametrization is not deck invariant".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Jacobian of the parametrization has full rank at a fixed rational point.
    fn generically_finite(&self) -> bool {
        let p = self.parametrization.as_ref().unwrap();
        let s = p.params.len();
        let pt: Vec<Rational> = (0..s).map(|j| crate::poly::ratio(2 + 3 * j as i64, 1 + j as i64 * 2 + 1)).collect();
        let jac: Vec<Vec<Rational>> = p.components.iter().map(|c| (0..s).map(|j| c.derivative(j).eval(&pt)).collect()).collect();
        // rank s iff the transpose system has only the trivial kernel: test each unit vector is reachable
        let cols: Vec<Vec<Rational>> = (0..self.nvars()).map(|i| jac[i].clone()).collect();
        let at: Vec<Vec<Rational>> = (0..s).map(|j| cols.iter().map(|r| r[j].clone()).collect()).collect();
        (0..s).all(|j| {
            let b: Vec<Rational> = (0..s).map(|i| if i == j { rat(1) } else { rat(0) }).collect();
            solve_dense(&at, &b).is_some()
        })
    }

    /// m = ⌊k/2⌋ style derived integers used in templates.
    pub fn template_vars(&self) -> BTreeMap<String, i64> {
        let mut v = BTreeMap::new();
        if let Some(k) = param_of(&self.id, "S").or_else(|| param_of(&self.id, "M")) {
            v.insert("k".into(), k);
            v.insert("m".into(), k / 2);
        }
        if let Some(n) = param_of(&self.id, "Fermat") {
            v.insert("n".into(), n);
            v.insert("p".into(), n / 2);
        }
        v
    }
}

/// Integer argument of an id like `S(4)`.
pub fn param_of(id: &str, head: &str) -> Option<i64> {
    id.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
}
