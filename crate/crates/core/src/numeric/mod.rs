//! Quadrature over parametrized cycles with ε-cutoffs around the singular locus:
//! integrals of ρ·u∧v̄, Stokes residuals, family scans and direct images.
//!
//! Patches are polynomial maps from a polydisc in C^p into the ambient space. Each
//! complex patch variable is integrated in polar coordinates with Gauss–Legendre
//! panels; along each ray the cut-off radius {h = ε} and the edge of supp ρ are
//! located by bisection so the radial integrand stays smooth. The pairing uses
//! (i/2)^p (−1)^{p(p−1)/2} ds∧ds̄ = Lebesgue measure.

pub mod cases;
mod eval;

pub use eval::{det, NumForm, NumMero, NumPoly, C};

use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::parse::parse_poly;
use crate::variety::Registry;
use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

/// Default ε-sequence: 10 geometric values from 1e-1 to 1e-6.
pub fn default_eps() -> Vec<f64> {
    eps_sequence(1e-1, 1e-6, 10)
}

pub fn eps_sequence(max: f64, min: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![min];
    }
    let r = (min / max).powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| max * r.powi(k as i32)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    C0,
    C1,
}

/// Radial bump in the ambient coordinates: (1 - |y-c|/R)_+ for C0 and
/// (1 - |y-c|²/R²)²_+ for C1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    /// Real center coordinates; empty means the origin.
    #[serde(default)]
    pub center: Vec<f64>,
    pub radius: f64,
    pub class: Smoothness,
}

impl CutoffSpec {
    pub fn bump(radius: f64, class: Smoothness) -> Self {
        CutoffSpec { center: Vec::new(), radius, class }
    }

    pub fn expression(&self) -> String {
        match self.class {
            Smoothness::C0 => format!("max(0, 1 - |y - c|/{})", self.radius),
            Smoothness::C1 => format!("max(0, 1 - |y - c|^2/{})^2", self.radius * self.radius),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Numeric(format!("cutoff radius must be positive, got {}", self.radius)));
        }
        if !self.center.is_empty() && self.center.len() != n {
            return Err(Error::Numeric(format!("cutoff center has {} coordinates, expected {}", self.center.len(), n)));
        }
        Ok(())
    }

    fn c(&self, i: usize) -> f64 {
        self.center.get(i).copied().unwrap_or(0.0)
    }

    fn q(&self, y: &[C]) -> f64 {
        y.iter().enumerate().map(|(i, v)| (v - self.c(i)).norm_sqr()).sum::<f64>() / (self.radius * self.radius)
    }

    pub fn value(&self, y: &[C]) -> f64 {
        let q = self.q(y);
        if q >= 1.0 {
            return 0.0;
        }
        match self.class {
            Smoothness::C0 => 1.0 - q.sqrt(),
            Smoothness::C1 => (1.0 - q) * (1.0 - q),
        }
    }

    /// ∂ρ/∂s given ∂y_i/∂s (C1 only).
    fn ds(&self, y: &[C], dy: &[C]) -> C {
        let q = self.q(y);
        if q >= 1.0 {
            return C::new(0.0, 0.0);
        }
        let dq: C = y.iter().zip(dy).enumerate().map(|(i, (v, d))| d * (v - self.c(i)).conj()).sum::<C>() / (self.radius * self.radius);
        dq * (-2.0 * (1.0 - q))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub from: f64,
    pub to: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    /// Ambient coordinates as polynomials in the patch variables (and the family parameter).
    pub components: Vec<String>,
    /// Polydisc center (real parts), one per patch variable; empty means 0.
    #[serde(default)]
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "one")]
    pub multiplicity: i64,
}

fn one() -> i64 {
    1
}

/// A p-cycle given by polynomial patches, optionally depending on a real parameter t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub variety: String,
    pub dim: usize,
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(rename = "patch")]
    pub patches: Vec<PatchSpec>,
}

impl CycleSpec {
    pub fn from_toml(text: &str) -> Result<CycleSpec> {
        toml::from_str(text).map_err(|e| Error::Schema {
            file: "<cycle>".into(),
            line: e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0),
            field: String::new(),
            msg: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

/// A patch compiled for evaluation.
#[derive(Clone, Debug)]
struct Patch {
    p: usize,
    comps: Vec<NumPoly>,
    jac: Vec<Vec<NumPoly>>,
    center: Vec<C>,
    radius: f64,
    mult: f64,
}

impl Patch {
    fn point(&self, s: &[C], t: Option<f64>) -> Vec<C> {
        let mut pt = s.to_vec();
        if let Some(t) = t {
            pt.push(C::new(t, 0.0));
        }
        pt
    }

    fn x(&self, s: &[C], t: Option<f64>) -> Vec<C> {
        let pt = self.point(s, t);
        self.comps.iter().map(|c| c.eval(&pt)).collect()
    }

    fn jac(&self, s: &[C], t: Option<f64>) -> Vec<Vec<C>> {
        let pt = self.point(s, t);
        self.jac.iter().map(|row| row.iter().map(|c| c.eval(&pt)).collect()).collect()
    }
}

/// A cycle compiled against its variety: patches plus the exclusion function h.
pub struct Cycle {
    pub spec: CycleSpec,
    patches: Vec<Patch>,
    nvars: usize,
    sing: Vec<NumPoly>,
}

impl Cycle {
    pub fn new(reg: &Registry, spec: &CycleSpec) -> Result<Cycle> {
        let v = reg.variety(&spec.variety)?;
        if spec.dim == 0 || spec.dim > v.dim {
            return Err(Error::Numeric(format!("cycle dimension {} on {} of dimension {}", spec.dim, v.id, v.dim)));
        }
        if spec.vars.len() != spec.dim {
            return Err(Error::Numeric(format!("cycle of dimension {} needs {} patch variables", spec.dim, spec.dim)));
        }
        let mut names = spec.vars.clone();
        if let Some(f) = &spec.family {
            names.push(f.name.clone());
        }
        let mut patches = Vec::new();
        for (k, ps) in spec.patches.iter().enumerate() {
            if ps.components.len() != v.nvars() {
                return Err(Error::Numeric(format!("patch {} has {} components, {} needs {}", k, ps.components.len(), v.id, v.nvars())));
            }
            let comps: Vec<_> = ps.components.iter().map(|c| parse_poly(c, &names)).collect::<std::result::Result<_, _>>()?;
            // the patch must lie on the variety (for every value of the family parameter)
            for f in &v.equations {
                if !f.compose(&comps).is_zero() {
                    return Err(Error::Numeric(format!("patch {} does not lie on {}", k, v.id)));
                }
            }
            if !(ps.radius > 0.0) {
                return Err(Error::Numeric(format!("patch {} needs a positive radius", k)));
            }
            let center = (0..spec.dim).map(|j| C::new(ps.center.get(j).copied().unwrap_or(0.0), 0.0)).collect();
            patches.push(Patch {
                p: spec.dim,
                jac: comps.iter().map(|c| (0..spec.dim).map(|j| NumPoly::new(&c.derivative(j))).collect()).collect(),
                comps: comps.iter().map(NumPoly::new).collect(),
                center,
                radius: ps.radius,
                mult: ps.multiplicity as f64,
            });
        }
        Ok(Cycle { spec: spec.clone(), patches, nvars: v.nvars(), sing: v.singular.iter().map(NumPoly::new).collect() })
    }

    fn h(&self, x: &[C]) -> f64 {
        if self.sing.is_empty() {
            return f64::INFINITY;
        }
        self.sing.iter().map(|g| g.eval(x).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Quadrature orders: base and refined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub order: usize,
    pub tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { order: 12, tol: 1e-6 }
    }
}

struct Rules {
    base: GaussLegendre,
    fine: GaussLegendre,
}

impl Rules {
    fn new(order: usize) -> Rules {
        let nz = |n: usize| std::num::NonZeroUsize::new(n.max(2)).unwrap();
        Rules { base: GaussLegendre::new(nz(order)), fine: GaussLegendre::new(nz(2 * order)) }
    }
}

/// Nodes and weights of a rule on [a, b] split into `panels` equal pieces.
fn nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
        for (x, w) in rule.nodes().zip(rule.weights()) {
            out.push((0.5 * ((hi - lo) * x + hi + lo), 0.5 * (hi - lo) * w));
        }
    }
    out
}

/// Radial breakpoints: geometric from r_lo, or uniform from 0.
fn radial_nodes(rule: &GaussLegendre, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    if hi <= lo {
        return Vec::new();
    }
    if lo <= 0.0 {
        return nodes(rule, 0.0, hi, 4);
    }
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a * 4.0).min(hi);
        out.extend(nodes(rule, a, b, 1));
        a = b;
    }
    out
}

fn bisect<F: Fn(f64) -> bool>(mut a: f64, mut b: f64, inside_at_a: bool, f: F) -> f64 {
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if f(m) == inside_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Local data handed to integrands.
pub struct Local<'a> {
    pub x: &'a [C],
    pub jac: &'a [Vec<C>],
}

/// Integral of `f` over one patch restricted to {h > ε} ∩ {support(x) holds}.
fn patch_integral<F>(cycle: &Cycle, patch: &Patch, eps: f64, rule: &GaussLegendre, t: Option<f64>, support: &(dyn Fn(&[C]) -> bool + Sync), f: &F) -> C
where
    F: Fn(&Local) -> C + Sync,
{
    let th = nodes(rule, 0.0, 2.0 * PI, 8);
    if patch.p == 1 {
        let c0 = patch.center[0];
        let mut total = C::new(0.0, 0.0);
        for &(theta, wt) in &th {
            let dir = C::from_polar(1.0, theta);
            let at = |r: f64| patch.x(&[c0 + dir * r], t);
            // edge of the support along the ray
            let n = 256;
            let mut hi = patch.radius;
            let mut prev = 0.0;
            for k in 1..=n {
                let r = patch.radius * k as f64 / n as f64;
                if !support(&at(r)) {
                    hi = bisect(prev, r, true, |r| support(&at(r)));
                    break;
                }
                prev = r;
            }
            // cut-off radius {h = ε}
            let mut lo = 0.0;
            if cycle.h(&at(hi)) <= eps {
                continue;
            }
            let m = 300;
            let rk = |k: usize| hi * 10f64.powf(-15.0 * (1.0 - k as f64 / m as f64));
            if let Some(k) = (0..m).rev().find(|&k| cycle.h(&at(rk(k))) <= eps) {
                lo = bisect(rk(k), rk(k + 1), false, |r| cycle.h(&at(r)) > eps);
            }
            for (r, wr) in radial_nodes(rule, lo, hi) {
                let s = [c0 + dir * r];
                let x = patch.x(&s, t);
                let jac = patch.jac(&s, t);
                total += f(&Local { x: &x, jac: &jac }) * (r * wr * wt);
            }
        }
        return total * patch.mult;
    }
    // p ≥ 2: tensor polar grid with indicator cut-off
    let rad = nodes(rule, 0.0, patch.radius, 4);
    let per: Vec<(C, f64)> = rad.iter().flat_map(|&(r, wr)| th.iter().map(move |&(a, wa)| (C::from_polar(r, a), r * wr * wa))).collect();
    let p = patch.p;
    let count = per.len().pow(p as u32);
    let total: C = (0..count)
        .into_par_iter()
        .map(|mut k| {
            let mut s = Vec::with_capacity(p);
            let mut w = 1.0;
            for j in 0..p {
                let (z, wz) = per[k % per.len()];
                k /= per.len();
                s.push(patch.center[j] + z);
                w *= wz;
            }
            let x = patch.x(&s, t);
            if cycle.h(&x) <= eps || !support(&x) {
                return C::new(0.0, 0.0);
            }
            let jac = patch.jac(&s, t);
            f(&Local { x: &x, jac: &jac }) * w
        })
        .sum();
    total * patch.mult
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralReport {
    pub eps: Vec<f64>,
    pub values: Vec<C>,
    pub limit: C,
    pub converged: bool,
    /// |I_n - I_2n| at the smallest ε (base vs refined orders).
    pub quad_error: f64,
    /// Error estimate of the extrapolated limit.
    pub extrapolation_error: f64,
    /// ∫ |ρ| h^p over the cut-off cycle at the smallest ε.
    pub mass: f64,
    pub orders: (usize, usize),
    pub notes: Vec<String>,
}

impl IntegralReport {
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| (w[1] - w[0]).norm()).collect()
    }

    /// Successive differences never grow (up to rounding).
    pub fn monotone(&self) -> bool {
        let inc = self.increments();
        let scale = self.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        inc.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-11 * scale)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "eps": self.eps,
            "values": self.values.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "limit": {"re": self.limit.re, "im": self.limit.im},
            "converged": self.converged,
            "quadrature_error": self.quad_error,
            "extrapolation_error": self.extrapolation_error,
            "mass": self.mass,
            "orders": [self.orders.0, self.orders.1],
            "notes": self.notes,
        })
    }
}

/// Iterated Aitken Δ² on the ε-table; returns the most stable level's last entry
/// and the difference of its last two entries.
pub fn extrapolate(values: &[C]) -> (C, f64) {
    let Some(&last) = values.last() else {
        return (C::new(0.0, 0.0), f64::INFINITY);
    };
    if values.len() < 2 {
        return (last, f64::INFINITY);
    }
    let diag = |v: &[C]| (v[v.len() - 1] - v[v.len() - 2]).norm();
    let mut best = (last, diag(values));
    let mut cur = values.to_vec();
    for _ in 0..3 {
        if cur.len() < 3 {
            break;
        }
        let scale = cur.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let next: Vec<C> = cur
            .windows(3)
            .map(|w| {
                let d1 = w[1] - w[0];
                let d2 = w[2] - w[1];
                let den = d2 - d1;
                if den.norm() <= 1e-14 * scale || d2.norm() <= 1e-15 * scale {
                    w[2]
                } else {
                    w[2] - d2 * d2 / den
                }
            })
            .collect();
        if next.len() >= 2 && diag(&next) < best.1 {
            best = (next[next.len() - 1], diag(&next));
        }
        cur = next;
    }
    best
}

fn build_report(eps: &[f64], base: Vec<C>, fine: Vec<C>, mass: f64, opts: QuadOptions) -> IntegralReport {
    let quad_error = (base[base.len() - 1] - fine[fine.len() - 1]).norm();
    let (limit, ex) = extrapolate(&fine);
    let mut r = IntegralReport {
        eps: eps.to_vec(),
        values: fine,
        limit,
        converged: false,
        quad_error,
        extrapolation_error: ex,
        mass,
        orders: (opts.order, 2 * opts.order),
        notes: Vec::new(),
    };
    let scale = limit.norm().max(1.0);
    let small = ex <= opts.tol * scale;
    r.converged = r.monotone() && small && r.values.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    if !r.monotone() {
        r.notes.push("increments are not monotone".into());
    }
    if !small {
        r.notes.push(format!("extrapolation error {:.3e} above tolerance", ex));
    }
    r
}

/// Integrand evaluated on the cut-off cycle, at both quadrature orders for every ε.
fn run<F>(cycle: &Cycle, rho: &CutoffSpec, post: Option<&[NumPoly]>, eps: &[f64], opts: QuadOptions, t: Option<f64>, f: F) -> Result<IntegralReport>
where
    F: Fn(&Local) -> C + Sync,
{
    let rules = Rules::new(opts.order);
    let image = |x: &[C]| -> Vec<C> {
        match post {
            Some(g) => g.iter().map(|p| p.eval(x)).collect(),
            None => x.to_vec(),
        }
    };
    let support = |x: &[C]| rho.value(&image(x)) > 0.0;
    let total = |rule: &GaussLegendre, e: f64, g: &(dyn Fn(&Local) -> C + Sync)| -> C {
        cycle.patches.iter().map(|p| patch_integral(cycle, p, e, rule, t, &support, &g)).sum()
    };
    let pairs: Vec<(C, C)> = eps.par_iter().map(|&e| (total(&rules.base, e, &f), total(&rules.fine, e, &f))).collect();
    let emin = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let mass_f = |l: &Local| -> C {
        let rv = rho.value(&image(l.x)).abs();
        let p = cycle.spec.dim;
        let g: Vec<Vec<C>> = (0..p).map(|a| (0..p).map(|b| (0..l.x.len()).map(|i| l.jac[i][a] * l.jac[i][b].conj()).sum()).collect()).collect();
        C::new(rv * det(g).re, 0.0)
    };
    let mass = total(&rules.fine, emin, &mass_f).re;
    let (base, fine): (Vec<C>, Vec<C>) = pairs.into_iter().unzip();
    Ok(build_report(eps, base, fine, mass, opts))
}

fn ambient(reg: &Registry, variety: &str, u: &DiffForm) -> Result<DiffForm> {
    match u.coords() {
        Coords::Ambient => Ok(u.clone()),
        Coords::Parameter => reg.model(variety)?.to_ambient(u),
    }
}

fn check_degree(u: &DiffForm, want: usize, what: &str) -> Result<()> {
    if u.degree() != want {
        return Err(Error::DegreeMismatch(format!("{} has degree {}, expected {}", what, u.degree(), want)));
    }
    Ok(())
}

/// ∫ ρ·u∧v̄ over the cycle for each ε (family parameter fixed to `t` if given).
pub fn integrate(reg: &Registry, cycle: &CycleSpec, rho: &CutoffSpec, u: &DiffForm, v: &DiffForm, eps: &[f64], opts: QuadOptions, t: Option<f64>) -> Result<IntegralReport> {
    let cyc = Cycle::new(reg, cycle)?;
    rho.validate(cyc.nvars)?;
    let p = cycle.dim;
    check_degree(u, p, "u")?;
    check_degree(v, p, "v")?;
    let nu = NumForm::new(&ambient(reg, &cycle.variety, u)?);
    let nv = NumForm::new(&ambient(reg, &cycle.variety, v)?);
    let cols: Vec<usize> = (0..p).collect();
    run(&cyc, rho, None, eps, opts, family_t(cycle, t)?, |l| {
        C::new(rho.value(l.x), 0.0) * nu.pull(l.x, l.jac, &cols) * nv.pull(l.x, l.jac, &cols).conj()
    })
}

fn family_t(cycle: &CycleSpec, t: Option<f64>) -> Result<Option<f64>> {
    match (&cycle.family, t) {
        (Some(_), Some(t)) => Ok(Some(t)),
        (Some(f), None) => Err(Error::Numeric(format!("cycle depends on {}; a parameter value is required", f.name))),
        (None, Some(_)) => Err(Error::Numeric("cycle has no family parameter".into())),
        (None, None) => Ok(None),
    }
}

/// |∫ d(ρ·u∧v̄)| via the expansion dρ∧u∧v̄ + ρ·du∧v̄ (the conjugate term vanishes on a
/// p-dimensional patch), with the ε-table in the report.
pub fn stokes_residual(reg: &Registry, cycle: &CycleSpec, rho: &CutoffSpec, u: &DiffForm, v: &DiffForm, eps: &[f64], opts: QuadOptions) -> Result<(f64, IntegralReport)> {
    if rho.class != Smoothness::C1 {
        return Err(Error::Numeric("Stokes runs need a C1 cutoff".into()));
    }
    let cyc = Cycle::new(reg, cycle)?;
    rho.validate(cyc.nvars)?;
    let p = cycle.dim;
    check_degree(u, p - 1, "u")?;
    check_degree(v, p, "v")?;
    let ua = ambient(reg, &cycle.variety, u)?;
    let nu = NumForm::new(&ua);
    let ndu = NumForm::new(&ua.d());
    let nv = NumForm::new(&ambient(reg, &cycle.variety, v)?);
    let all: Vec<usize> = (0..p).collect();
    let report = run(&cyc, rho, None, eps, opts, family_t(cycle, None)?, |l| {
        let mut s = C::new(rho.value(l.x), 0.0) * ndu.pull(l.x, l.jac, &all);
        for j in 0..p {
            let dy: Vec<C> = (0..l.x.len()).map(|i| l.jac[i][j]).collect();
            let cols: Vec<usize> = (0..p).filter(|&k| k != j).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += rho.ds(l.x, &dy) * nu.pull(l.x, l.jac, &cols) * sign;
        }
        s * nv.pull(l.x, l.jac, &all).conj()
    })?;
    Ok((report.limit.norm(), report))
}

#[derive(Clone, Debug)]
pub struct FamilyScan {
    pub t: Vec<f64>,
    pub reports: Vec<IntegralReport>,
    /// Smallest C with |φ(t)| ≤ C·mass(t) on the grid.
    pub constant: f64,
    pub sup: f64,
    pub failures: Vec<f64>,
}

impl FamilyScan {
    pub fn bounded(&self) -> bool {
        self.sup.is_finite() && self.constant.is_finite()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "phi": self.reports.iter().map(|r| [r.limit.re, r.limit.im]).collect::<Vec<_>>(),
            "mass": self.reports.iter().map(|r| r.mass).collect::<Vec<_>>(),
            "converged": self.reports.iter().map(|r| r.converged).collect::<Vec<_>>(),
            "sup_phi": self.sup,
            "constant": self.constant,
            "bounded": self.bounded(),
            "failures": self.failures,
        })
    }

    /// CSV with header t,re,im,mass,converged.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io { path: "<csv>".into(), msg: e.to_string() };
        w.write_record(["t", "re", "im", "mass", "converged"]).map_err(io)?;
        for (t, r) in self.t.iter().zip(&self.reports) {
            w.write_record(&[t.to_string(), r.limit.re.to_string(), r.limit.im.to_string(), r.mass.to_string(), r.converged.to_string()])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io { path: "<csv>".into(), msg: e.to_string() })?;
        Ok(String::from_utf8(bytes).unwrap())
    }
}

/// Geometric grid over the family range.
pub fn family_grid(f: &FamilySpec) -> Vec<f64> {
    if f.points < 2 || f.from <= 0.0 {
        let n = f.points.max(2);
        return (0..n).map(|k| f.from + (f.to - f.from) * k as f64 / (n - 1) as f64).collect();
    }
    eps_sequence(f.to, f.from, f.points).into_iter().rev().collect()
}

pub fn family_scan(reg: &Registry, cycle: &CycleSpec, rho: &CutoffSpec, u: &DiffForm, v: &DiffForm, grid: Option<Vec<f64>>, eps: &[f64], opts: QuadOptions) -> Result<FamilyScan> {
    let fam = cycle.family.as_ref().ok_or_else(|| Error::Numeric("family scan needs a cycle with a family parameter".into()))?;
    let t = grid.unwrap_or_else(|| family_grid(fam));
    let reports: Vec<IntegralReport> = t.iter().map(|&tv| integrate(reg, cycle, rho, u, v, eps, opts, Some(tv))).collect::<Result<_>>()?;
    let sup = reports.iter().map(|r| r.limit.norm()).fold(0.0, f64::max);
    let constant = reports.iter().map(|r| if r.mass > 0.0 { r.limit.norm() / r.mass } else if r.limit.norm() == 0.0 { 0.0 } else { f64::INFINITY }).fold(0.0, f64::max);
    let failures = t.iter().zip(&reports).filter(|(_, r)| !r.converged).map(|(t, _)| *t).collect();
    Ok(FamilyScan { t, reports, constant, sup, failures })
}

#[derive(Clone, Debug)]
pub struct DirectImageReport {
    /// Over the image cycle on the target (times the covering degree).
    pub target: IntegralReport,
    /// Over the source cycle with pulled-back forms and ρ∘f.
    pub source: IntegralReport,
    pub degree: i64,
    pub relative_difference: f64,
    pub notes: Vec<String>,
}

impl DirectImageReport {
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.to_json(),
            "source": self.source.to_json(),
            "degree": self.degree,
            "relative_difference": self.relative_difference,
            "notes": self.notes,
        })
    }
}

/// Compare ∫_{f_*Z} ρ u∧v̄ with ∫_Z (ρ∘f) f*u∧conj(f*v). Without an explicit image
/// cycle the image patches are f composed with the patches of Z (degree 1).
pub fn direct_image_check(
    reg: &Registry,
    map_id: &str,
    z: &CycleSpec,
    image: Option<(&CycleSpec, i64)>,
    rho: &CutoffSpec,
    u: &DiffForm,
    v: &DiffForm,
    eps: &[f64],
    opts: QuadOptions,
) -> Result<DirectImageReport> {
    let m = reg.map(map_id)?;
    if reg.variety(&z.variety)?.id != reg.variety(&m.source)?.id {
        return Err(Error::InvalidMap(format!("cycle lives on {}, map starts at {}", z.variety, m.source)));
    }
    let tgt = reg.variety(&m.target)?;
    let src = reg.variety(&m.source)?;
    let ua = ambient(reg, &tgt.id, u)?;
    let va = ambient(reg, &tgt.id, v)?;
    let (img, degree) = match image {
        Some((c, d)) => (c.clone(), d),
        None => {
            let mut names = z.vars.clone();
            if let Some(f) = &z.family {
                names.push(f.name.clone());
            }
            let patches = z
                .patches
                .iter()
                .map(|p| -> Result<PatchSpec> {
                    let comps: Vec<_> = p.components.iter().map(|c| parse_poly(c, &names)).collect::<std::result::Result<_, _>>()?;
                    let out = m.components.iter().map(|g| crate::parse::print_poly(&g.compose(&comps), &names)).collect();
                    Ok(PatchSpec { components: out, center: p.center.clone(), radius: p.radius, multiplicity: p.multiplicity })
                })
                .collect::<Result<_>>()?;
            (CycleSpec { variety: tgt.id.clone(), dim: z.dim, vars: z.vars.clone(), family: z.family.clone(), patches }, 1)
        }
    };
    let mut target = integrate(reg, &img, rho, &ua, &va, eps, opts, None)?;
    let d = degree as f64;
    for x in target.values.iter_mut() {
        *x *= d;
    }
    target.limit *= d;
    target.mass *= d;
    // source side: pulled-back forms, ρ evaluated at f(x)
    let fu = reg.pullback(&m, &ua)?;
    let fv = reg.pullback(&m, &va)?;
    let cyc = Cycle::new(reg, z)?;
    rho.validate(tgt.nvars())?;
    let post: Vec<NumPoly> = m.components.iter().map(NumPoly::new).collect();
    let nu = NumForm::new(&fu);
    let nv = NumForm::new(&fv);
    let cols: Vec<usize> = (0..z.dim).collect();
    let _ = src;
    let source = run(&cyc, rho, Some(&post), eps, opts, None, |l| {
        let y: Vec<C> = post.iter().map(|p| p.eval(l.x)).collect();
        C::new(rho.value(&y), 0.0) * nu.pull(l.x, l.jac, &cols) * nv.pull(l.x, l.jac, &cols).conj()
    })?;
    let scale = target.limit.norm().max(source.limit.norm()).max(1e-300);
    let relative_difference = (target.limit - source.limit).norm() / scale;
    let mut notes = Vec::new();
    if image.is_some() && target.limit.norm() > 0.0 {
        let ratio = source.limit.norm() / (target.limit.norm() / d);
        if (ratio - d).abs() > 1e-3 * d {
            notes.push(format!("covering degree {} inconsistent with the ratio {:.6}", degree, ratio));
        }
    }
    Ok(DirectImageReport { target, source, degree, relative_difference, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_default_endpoints() {
        let e = default_eps();
        assert_eq!(e.len(), 10);
        assert!((e[0] - 1e-1).abs() < 1e-15);
        assert!((e[9] - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn aitken_recovers_power_law() {
        let vals: Vec<C> = default_eps().iter().map(|e| C::new(2.0 - 3.0 * e.powf(2.0 / 3.0), 0.0)).collect();
        let (l, err) = extrapolate(&vals);
        assert!((l.re - 2.0).abs() < 1e-10, "{}", l);
        assert!(err < 1e-8);
    }

    #[test]
    fn bump_values() {
        let r = CutoffSpec::bump(2.0, Smoothness::C1);
        assert_eq!(r.value(&[C::new(0.0, 0.0)]), 1.0);
        assert_eq!(r.value(&[C::new(2.0, 0.0)]), 0.0);
        assert!((r.value(&[C::new(1.0, 0.0)]) - 0.5625).abs() < 1e-15);
    }
}
