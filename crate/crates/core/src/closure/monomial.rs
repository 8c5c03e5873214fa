//! Rank-one monomial decision: Newton polyhedron by exact LP, cross-checked by a
//! bounded lattice search for a certificate z^k - ω^k with ω^k in M^k.

use super::arc::ArcSpec;
use crate::error::{Error, Result};
use crate::forms::DiffForm;
use crate::poly::lp::{maximize, LpResult};
use crate::poly::{rat, Rational};
use crate::variety::{Model, ParamModel};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Search bound (power of ω) for the lattice oracle.
pub const LATTICE_BOUND: usize = 24;

#[derive(Clone, Debug)]
pub struct MonomialDecision {
    pub inside: bool,
    /// Multidegree of the cover monomial.
    pub degree: Vec<i64>,
    pub gen_degrees: Vec<Vec<i64>>,
    /// Convex weights on the generators when inside.
    pub lambda: Option<Vec<Rational>>,
    /// Integral separating weight when outside.
    pub weight: Option<Vec<i64>>,
    /// (k, generator multiset) with k·d - Σ d_g in the semigroup.
    pub lattice: Option<(usize, Vec<usize>)>,
    pub arc: Option<ArcSpec>,
}

/// Multidegree of a single-term working form.
pub fn monomial_degree(pm: &ParamModel, u: &DiffForm) -> Result<Vec<i64>> {
    if u.components().len() != 1 {
        return Err(Error::NonMonomial(format!("{} terms", u.components().len())));
    }
    let (idx, f) = u.components().iter().next().unwrap();
    let terms = f.laurent_terms();
    if terms.len() != 1 {
        return Err(Error::NonMonomial(format!("coefficient has {} terms", terms.len())));
    }
    let beta = terms.keys().next().unwrap();
    let _ = pm;
    Ok(ParamModel::multidegree(beta, idx))
}

/// Decide ω ∈ α^q for a rank-one degree q (q = 0 or q = number of parameters).
pub fn decide_monomial(model: &Model, omega: &DiffForm) -> Result<MonomialDecision> {
    let pm = model.param().ok_or_else(|| Error::Unsupported(format!("{} has no monomial parametrization", model.spec().id)))?;
    let omega = model.to_work(omega)?;
    let q = omega.degree();
    if q != 0 && q != pm.s {
        return Err(Error::NonMonomial(format!("degree {} has rank {} on the cover", q, model.positions(q).len())));
    }
    if omega.is_zero() {
        return Err(Error::NonMonomial("zero form".into()));
    }
    let d = monomial_degree(pm, &omega)?;
    if !pm.invariant(&d) {
        return Err(Error::Unsupported("cover monomial is not deck invariant".into()));
    }
    let mut gen_degrees = Vec::new();
    for g in model.omega_gens(q)? {
        gen_degrees.push(monomial_degree(pm, &g)?);
    }
    decide_degree(pm, &d, &gen_degrees)
}

/// The decision on raw degrees; the cone of the coordinate semigroup is the orthant
/// because every parameter has a pure-power coordinate.
pub fn decide_degree(pm: &ParamModel, d: &[i64], gen_degrees: &[Vec<i64>]) -> Result<MonomialDecision> {
    let s = d.len();
    let ng = gen_degrees.len();
    // primal: Σ λ_g d_g + μ = d, Σ λ = 1
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..s {
        let mut row: Vec<Rational> = gen_degrees.iter().map(|g| rat(g[j])).collect();
        row.extend((0..s).map(|i| if i == j { Rational::one() } else { Rational::zero() }));
        a.push(row);
        b.push(rat(d[j]));
    }
    let mut row: Vec<Rational> = vec![Rational::one(); ng];
    row.extend(vec![Rational::zero(); s]);
    a.push(row);
    b.push(Rational::one());
    let c = vec![Rational::zero(); ng + s];
    let (inside, lambda) = match maximize(&a, &b, &c) {
        LpResult::Optimal { x, .. } => (true, Some(x[..ng].to_vec())),
        LpResult::Infeasible => (false, None),
        LpResult::Unbounded => unreachable!("zero objective"),
    };
    let weight = if inside { None } else { Some(separating_weight(d, gen_degrees)?) };
    let lattice = lattice_oracle(pm, d, gen_degrees, LATTICE_BOUND);
    if inside != lattice.is_some() {
        return Err(Error::OracleDisagreement(format!(
            "degree {:?}: polyhedron says {}, lattice search (k <= {}) says {}",
            d,
            inside,
            LATTICE_BOUND,
            lattice.is_some()
        )));
    }
    let arc = weight.as_ref().map(|w| {
        let names = &pm.spec.parametrization.as_ref().unwrap().params;
        ArcSpec::cover(w.clone(), vec![Rational::one(); s], names)
    });
    Ok(MonomialDecision { inside, degree: d.to_vec(), gen_degrees: gen_degrees.to_vec(), lambda, weight, lattice, arc })
}

/// w ≥ 0 with w·(d_g - d) ≥ 1 for every generator, scaled to coprime integers.
fn separating_weight(d: &[i64], gen_degrees: &[Vec<i64>]) -> Result<Vec<i64>> {
    let s = d.len();
    let ng = gen_degrees.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (gi, g) in gen_degrees.iter().enumerate() {
        let mut row: Vec<Rational> = (0..s).map(|j| rat(g[j] - d[j])).collect();
        row.extend((0..ng).map(|i| if i == gi { -Rational::one() } else { Rational::zero() }));
        a.push(row);
        b.push(Rational::one());
    }
    // prefer small weights
    let mut c: Vec<Rational> = vec![-Rational::one(); s];
    c.extend(vec![Rational::zero(); ng]);
    let x = match maximize(&a, &b, &c) {
        LpResult::Optimal { x, .. } => x,
        _ => return Err(Error::OracleDisagreement(format!("degree {:?} outside the polyhedron but not separable", d))),
    };
    let w = &x[..s];
    let l = w.iter().fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<num_bigint::BigInt> = w.iter().map(|r| (r * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { num_bigint::BigInt::one() } else { g };
    Ok(ints.iter().map(|x| i64::try_from(x / &g).unwrap_or(i64::MAX)).collect())
}

/// Smallest k ≤ bound and generator multiset with k·d - Σ d_g in the semigroup.
pub fn lattice_oracle(pm: &ParamModel, d: &[i64], gen_degrees: &[Vec<i64>], bound: usize) -> Option<(usize, Vec<usize>)> {
    fn rec(pm: &ParamModel, left: usize, start: usize, rest: Vec<i64>, gens: &[Vec<i64>], chosen: &mut Vec<usize>) -> bool {
        if left == 0 {
            return pm.semigroup(&rest).is_some();
        }
        for i in start..gens.len() {
            let r: Vec<i64> = rest.iter().zip(&gens[i]).map(|(a, b)| a - b).collect();
            // later choices only subtract more
            if r.iter().any(|&x| x < 0) {
                continue;
            }
            chosen.push(i);
            if rec(pm, left - 1, i, r, gens, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    for k in 1..=bound {
        let target: Vec<i64> = d.iter().map(|x| x * k as i64).collect();
        let mut chosen = Vec::new();
        if rec(pm, k, 0, target, gen_degrees, &mut chosen) {
            return Some((k, chosen));
        }
    }
    None
}
