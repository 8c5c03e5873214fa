//! Valuative refutation along monomial arcs.
//!
//! If ω is integral over M then along every arc φ the coefficient vector φ*ω lies
//! in the C[[τ]]-span of the φ*g. Two tests use this: the order test compares
//! τ-orders, and the module test (cover model) compares leading coefficient vectors.

use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::poly::linalg::{EchelonBasis, SparseVec};
use crate::poly::{fmt_rational, rat, ratio, Polynomial, Rational};
use crate::variety::{Model, ParamModel};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

/// t_j = c_j τ^{w_j} on the cover (Parameter) or x_i = c_i τ^{w_i} in ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSpec {
    pub coords: Coords,
    pub weights: Vec<i64>,
    pub consts: Vec<Rational>,
    pub description: String,
}

impl ArcSpec {
    pub fn cover(weights: Vec<i64>, consts: Vec<Rational>, names: &[String]) -> ArcSpec {
        let description = names
            .iter()
            .zip(weights.iter().zip(&consts))
            .map(|(n, (w, c))| {
                let c = if c.is_one() { String::new() } else { format!("{}*", fmt_rational(c)) };
                match w {
                    0 => format!("{}={}", n, if c.is_empty() { "1".into() } else { c.trim_end_matches('*').to_string() }),
                    1 => format!("{}={}t", n, c),
                    _ => format!("{}={}t^{}", n, c, w),
                }
            })
            .collect::<Vec<_>>()
            .join(", ");
        ArcSpec { coords: Coords::Parameter, weights, consts, description }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coords": self.coords,
            "weights": self.weights,
            "constants": self.consts.iter().map(fmt_rational).collect::<Vec<_>>(),
            "description": self.description,
        })
    }

    /// Ambient arcs must lie on the variety.
    pub fn validate(&self, model: &Model) -> Result<()> {
        let spec = model.spec();
        match self.coords {
            Coords::Parameter => {
                let pm = model.param().ok_or_else(|| Error::CoordMismatch("cover arc on a variety without parametrization".into()))?;
                if self.weights.len() != pm.s || self.consts.len() != pm.s {
                    return Err(Error::CoordMismatch(format!("arc needs {} parameters", pm.s)));
                }
                if self.weights.iter().any(|&w| w < 0) || self.consts.iter().any(|c| c.is_zero()) {
                    return Err(Error::InvalidParameter("arc weights must be >= 0 and constants non-zero".into()));
                }
            }
            Coords::Ambient => {
                if self.weights.len() != spec.nvars() || self.consts.len() != spec.nvars() {
                    return Err(Error::CoordMismatch(format!("arc needs {} coordinates", spec.nvars())));
                }
                let subs = self.tau_subs();
                for f in &spec.equations {
                    if !f.compose(&subs).is_zero() {
                        return Err(Error::InvalidParameter(format!("arc '{}' does not lie on {}", self.description, spec.id)));
                    }
                }
            }
        }
        Ok(())
    }

    fn tau_subs(&self) -> Vec<Polynomial> {
        self.weights
            .iter()
            .zip(&self.consts)
            .map(|(&w, c)| Polynomial::monomial(1, vec![w as u32], c.clone()))
            .collect()
    }

    fn const_pow(&self, e: &[i64]) -> Rational {
        let mut r = Rational::one();
        for (c, &k) in self.consts.iter().zip(e) {
            let p = num_traits::pow(c.clone(), k.unsigned_abs() as usize);
            if k >= 0 {
                r *= p;
            } else {
                r /= p;
            }
        }
        r
    }
}

/// Stock cover arcs: the diagonal and the axes first, then every primitive weight
/// vector in {0..max_w}^s. Each weight comes with unit constants (when `unit`) and
/// two generic constant vectors.
pub fn stock_arcs(pm: &ParamModel, max_w: i64, unit: bool) -> Vec<ArcSpec> {
    let s = pm.s;
    let names = &pm.spec.parametrization.as_ref().unwrap().params;
    let mut weights: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; s];
    loop {
        let mut i = 0;
        loop {
            if i == s {
                break;
            }
            cur[i] += 1;
            if cur[i] <= max_w {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == s {
            break;
        }
        let g = cur.iter().fold(0i64, |a, &b| a.gcd(&b));
        if g == 1 {
            weights.push(cur.clone());
        }
    }
    let diag = vec![1i64; s];
    weights.sort_by_key(|w| (*w != diag, w.iter().filter(|&&x| x > 0).count() != 1 || w.iter().sum::<i64>() != 1, *w.iter().max().unwrap(), w.iter().sum::<i64>(), w.clone()));
    let primes = [2i64, 3, 5, 7, 11, 13, 17];
    let generic_a: Vec<Rational> = (0..s).map(|j| rat(primes[j % primes.len()])).collect();
    let generic_b: Vec<Rational> = (0..s).map(|j| ratio(if j % 2 == 0 { 3 + 4 * j as i64 } else { -(5 + 2 * j as i64) }, 2 + j as i64)).collect();
    let mut out = Vec::new();
    for w in weights {
        if unit {
            out.push(ArcSpec::cover(w.clone(), vec![Rational::one(); s], names));
        }
        out.push(ArcSpec::cover(w.clone(), generic_a.clone(), names));
        out.push(ArcSpec::cover(w, generic_b.clone(), names));
    }
    out
}

/// Leading coefficient vector of a degree-d element along the arc, after scaling
/// position I by τ^{w·1_I}.
fn normalized(v: &SparseVec<Vec<usize>>, d: &[i64], arc: &ArcSpec) -> SparseVec<Vec<usize>> {
    v.iter()
        .map(|(idx, c)| {
            let mut e = d.to_vec();
            for &i in idx {
                e[i] -= 1;
            }
            (idx.clone(), c * arc.const_pow(&e))
        })
        .collect()
}

fn dot(w: &[i64], d: &[i64]) -> i64 {
    w.iter().zip(d).map(|(a, b)| a * b).sum()
}

/// Module test on one multidegree: true when the element is compatible with
/// membership along this arc.
pub fn module_on_arc(d: &[i64], v: &SparseVec<Vec<usize>>, gens: &[(Vec<i64>, SparseVec<Vec<usize>>)], arc: &ArcSpec) -> bool {
    let a = dot(&arc.weights, d);
    let mut eb = EchelonBasis::new();
    for (dg, gv) in gens {
        if dot(&arc.weights, dg) <= a {
            eb.insert(&normalized(gv, dg, arc));
        }
    }
    eb.contains(&normalized(v, d, arc))
}

/// Outcome of an arc test; `refuted` is a proof of non-membership.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcRefutation {
    pub refuted: bool,
    pub method: &'static str,
    pub order_form: Option<i64>,
    pub order_gens: Option<i64>,
}

fn order_of_vec(v: &SparseVec<Vec<usize>>, d: &[i64], w: &[i64]) -> Option<i64> {
    v.keys()
        .map(|idx| {
            let mut e = d.to_vec();
            for &i in idx {
                e[i] -= 1;
            }
            dot(w, &e)
        })
        .min()
}

/// One-way test: `refuted` implies ω is not integral over the module spanned by `gens`.
pub fn refute_by_arc(model: &Model, omega: &DiffForm, gens: &[DiffForm], arc: &ArcSpec) -> Result<ArcRefutation> {
    arc.validate(model)?;
    let omega = if omega.coords() == model.work_coords() { omega.clone() } else { model.to_work(omega)? };
    let gens: Vec<DiffForm> = gens
        .iter()
        .map(|g| if g.coords() == model.work_coords() { Ok(g.clone()) } else { model.to_work(g) })
        .collect::<Result<_>>()?;
    match (model, arc.coords) {
        (Model::Param(pm), Coords::Parameter) => {
            let parts = pm.homogeneous_parts(&omega);
            let mut hgens = Vec::new();
            for g in &gens {
                let hp = pm.homogeneous_parts(g);
                if hp.len() > 1 {
                    return Err(Error::Unsupported("arc module test needs homogeneous generators".into()));
                }
                for (dg, part) in hp {
                    hgens.push((dg, pm.vector(&part)));
                }
            }
            let ord_w = parts.iter().filter_map(|(d, p)| order_of_vec(&pm.vector(p), d, &arc.weights)).min();
            let ord_g = hgens.iter().filter_map(|(d, v)| order_of_vec(v, d, &arc.weights)).min();
            if ord_w.is_none() {
                return Ok(ArcRefutation { refuted: false, method: "order", order_form: None, order_gens: ord_g });
            }
            if ord_g.is_none() || ord_w < ord_g {
                return Ok(ArcRefutation { refuted: true, method: "order", order_form: ord_w, order_gens: ord_g });
            }
            for (d, p) in &parts {
                if !module_on_arc(d, &pm.vector(p), &hgens, arc) {
                    return Ok(ArcRefutation { refuted: true, method: "module", order_form: ord_w, order_gens: ord_g });
                }
            }
            Ok(ArcRefutation { refuted: false, method: "module", order_form: ord_w, order_gens: ord_g })
        }
        (_, Coords::Ambient) => {
            let subs = arc.tau_subs();
            let pos = model.positions(omega.degree());
            let order = |u: &DiffForm| -> Result<Option<i64>> {
                let work = match model {
                    Model::Ambient(_) => u,
                    Model::Param(_) => return Err(Error::Unsupported("ambient arcs on covered varieties".into())),
                };
                let mut best: Option<i64> = None;
                for idx in &pos {
                    let f = work.component(idx);
                    if f.is_zero() {
                        continue;
                    }
                    let g = f.compose(&subs)?;
                    if let Some(m) = g.laurent_terms().keys().map(|e| e[0]).min() {
                        best = Some(best.map_or(m, |b: i64| b.min(m)));
                    }
                }
                Ok(best)
            };
            let ow = order(&omega)?;
            let mut og: Option<i64> = None;
            for g in &gens {
                if let Some(o) = order(g)? {
                    og = Some(og.map_or(o, |b: i64| b.min(o)));
                }
            }
            match (ow, og) {
                (None, None) => Err(Error::DegenerateArc(arc.description.clone())),
                (None, _) => Ok(ArcRefutation { refuted: false, method: "order", order_form: None, order_gens: og }),
                (Some(_), None) => Ok(ArcRefutation { refuted: true, method: "order", order_form: ow, order_gens: None }),
                (Some(a), Some(b)) => Ok(ArcRefutation { refuted: a < b, method: "order", order_form: ow, order_gens: og }),
            }
        }
        (Model::Ambient(_), Coords::Parameter) => Err(Error::CoordMismatch("cover arc on a variety without parametrization".into())),
    }
}
