//! Certificate search on the cover: with ω homogeneous of degree d, each S_h is a
//! combination of t^{hd - Σ d_g}·g_1⋯g_h over generator multisets, so P(ω) = 0 is a
//! linear system in the unknown combination coefficients.

use super::certificate::{rational_string, CertTerm, DependenceCertificate};
use super::sym::SymElem;
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::mero::MeroFunction;
use crate::parse::print_poly;
use crate::poly::linalg::solve_dense;
use crate::poly::{Polynomial, Rational};
use crate::variety::{Model, ParamModel};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Ω^q/torsion generators as (ambient form, working form), skipping zeros and repeats.
pub fn named_omega_gens(model: &Model, q: usize) -> Result<Vec<(DiffForm, DiffForm)>> {
    let n = model.spec().nvars();
    let mut out: Vec<(DiffForm, DiffForm)> = Vec::new();
    for j in crate::variety::subsets(&(0..n).collect::<Vec<_>>(), q) {
        let mut u = DiffForm::one(n, Coords::Ambient);
        for &i in &j {
            u = u.wedge(&DiffForm::differential(n, i, Coords::Ambient))?;
        }
        let w = model.to_work(&u)?;
        if !w.is_zero() && !out.iter().any(|(_, x)| *x == w) {
            out.push((u, w));
        }
    }
    Ok(out)
}

fn multisets(n: usize, h: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, h: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == h {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, h, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, h, 0, &mut Vec::new(), &mut out);
    out
}

fn flatten(x: &SymElem, into: &mut BTreeMap<(Vec<u32>, Vec<i64>), Rational>, sign: &Rational) {
    for (te, f) in &x.terms {
        for (e, c) in f.laurent_terms() {
            let slot = into.entry((te.clone(), e)).or_insert_with(Rational::zero);
            *slot += c * sign;
        }
    }
}

/// Look for a monic relation of degree 2..=max_k for a homogeneous cover form.
pub fn search_certificate(model: &Model, target: &DiffForm, max_k: usize) -> Result<Option<DependenceCertificate>> {
    let pm: &ParamModel = model.param().ok_or_else(|| Error::Unsupported("certificate search needs a cover model".into()))?;
    let target = model.to_work(target)?;
    let q = target.degree();
    let d = pm.is_homogeneous(&target).ok_or_else(|| Error::Unsupported("certificate search needs a homogeneous form".into()))?;
    let gens = named_omega_gens(model, q)?;
    let degs: Vec<Vec<i64>> = gens
        .iter()
        .map(|(_, w)| pm.is_homogeneous(w).ok_or_else(|| Error::Unsupported("inhomogeneous Ω generator".into())))
        .collect::<Result<_>>()?;
    let npos = model.positions(q).len();
    let w = SymElem::from_form(model, &target)?;
    let gsym: Vec<SymElem> = gens.iter().map(|(_, g)| SymElem::from_form(model, g)).collect::<Result<_>>()?;
    for k in 2..=max_k {
        let mut cols: Vec<(usize, Vec<usize>, Vec<u32>, BTreeMap<(Vec<u32>, Vec<i64>), Rational>)> = Vec::new();
        let wpows: Vec<SymElem> = (0..=k).map(|i| w.pow(i, model)).collect();
        for h in 1..=k {
            for ms in multisets(gens.len(), h) {
                let e: Vec<i64> = (0..pm.s).map(|j| h as i64 * d[j] - ms.iter().map(|&g| degs[g][j]).sum::<i64>()).collect();
                let Some(gamma) = pm.semigroup(&e) else { continue };
                let mut x = SymElem::scalar(MeroFunction::laurent_monomial(pm.s, &e, Rational::one()), npos);
                for &g in &ms {
                    x = x.mul(&gsym[g], model);
                }
                x = x.mul(&wpows[k - h], model);
                let mut flat = BTreeMap::new();
                flatten(&x, &mut flat, &Rational::one());
                cols.push((h, ms, gamma, flat));
            }
        }
        if cols.is_empty() {
            continue;
        }
        let mut rhs_map = BTreeMap::new();
        flatten(&wpows[k], &mut rhs_map, &-Rational::one());
        let mut keys: Vec<(Vec<u32>, Vec<i64>)> = rhs_map.keys().cloned().collect();
        for (_, _, _, f) in &cols {
            keys.extend(f.keys().cloned());
        }
        keys.sort();
        keys.dedup();
        let a: Vec<Vec<Rational>> = keys
            .iter()
            .map(|key| cols.iter().map(|(_, _, _, f)| f.get(key).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        let b: Vec<Rational> = keys.iter().map(|key| rhs_map.get(key).cloned().unwrap_or_else(Rational::zero)).collect();
        let Some(sol) = solve_dense(&a, &b) else { continue };
        let spec = model.spec();
        let n = spec.nvars();
        let mut bindings = BTreeMap::new();
        let mut used = vec![false; gens.len()];
        let mut terms = Vec::new();
        for ((h, ms, gamma, _), lam) in cols.iter().zip(&sol) {
            if lam.is_zero() {
                continue;
            }
            let gi: Vec<i64> = gamma.iter().map(|&x| x as i64).collect();
            let coeff = Polynomial::monomial(n, gamma.clone(), lam / pm.monomial_const(&gi));
            for &g in ms {
                used[g] = true;
            }
            terms.push(CertTerm { h: *h, coeff: print_poly(&coeff, &spec.vars), gens: ms.iter().map(|g| format!("g{}", g)).collect() });
        }
        for (i, (amb, _)) in gens.iter().enumerate() {
            if used[i] {
                bindings.insert(format!("g{}", i), spec.print(amb));
            }
        }
        let _ = rational_string;
        return Ok(Some(DependenceCertificate {
            name: None,
            variety: spec.id.clone(),
            form: model.print(&target),
            degree: k,
            pullback: None,
            scale: None,
            bindings,
            terms,
        }));
    }
    Ok(None)
}
