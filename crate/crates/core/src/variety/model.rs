//! Working models in which forms on a variety are compared exactly.
//!
//! A monomially parametrized variety is modelled on its smooth cover: a form
//! becomes a Laurent form in the parameters, O is the semigroup ring of the
//! component degrees, and O-modules are handled one multidegree at a time.
//! Other hypersurfaces use the ambient model: one differential dx_e with
//! ∂f/∂x_e a monomial is eliminated and coefficients are reduced modulo f.

use super::VarietySpec;
use crate::error::{Error, Result};
use crate::forms::{Coords, DiffForm};
use crate::mero::MeroFunction;
use crate::poly::linalg::{EchelonBasis, SparseVec};
use crate::poly::{normal_form, rat, MonomialOrder, ModuleBasis, ModuleVec, Polynomial, Rational};
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// All strictly increasing index lists of length q drawn from `from`.
pub fn subsets(from: &[usize], q: usize) -> Vec<Vec<usize>> {
    fn rec(from: &[usize], q: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..from.len() {
            cur.push(from[i]);
            rec(from, q, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(from, q, 0, &mut Vec::new(), &mut out);
    out
}

pub enum Model {
    Param(ParamModel),
    Ambient(AmbientModel),
}

impl Model {
    pub fn new(spec: &VarietySpec) -> Result<Model> {
        if spec.parametrization.is_some() {
            return Ok(Model::Param(ParamModel::new(spec)?));
        }
        Ok(Model::Ambient(AmbientModel::new(spec)?))
    }

    pub fn spec(&self) -> &VarietySpec {
        match self {
            Model::Param(m) => &m.spec,
            Model::Ambient(m) => &m.spec,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Model::Param(_))
    }

    pub fn dim(&self) -> usize {
        self.spec().dim
    }

    pub fn work_coords(&self) -> Coords {
        match self {
            Model::Param(_) => Coords::Parameter,
            Model::Ambient(_) => Coords::Ambient,
        }
    }

    /// Convert an ambient (or, for covers, parameter) form into the working model.
    pub fn to_work(&self, u: &DiffForm) -> Result<DiffForm> {
        if u.degree() > self.dim() {
            return Err(Error::DegreeTooLarge { degree: u.degree(), dim: self.dim() });
        }
        match self {
            Model::Param(m) => m.to_work(u),
            Model::Ambient(m) => m.to_work(u),
        }
    }

    pub fn to_ambient(&self, u: &DiffForm) -> Result<DiffForm> {
        match (self, u.coords()) {
            (_, Coords::Ambient) => Ok(u.clone()),
            (Model::Param(m), Coords::Parameter) => m.to_ambient(u),
            (Model::Ambient(_), Coords::Parameter) => Err(Error::CoordMismatch("variety has no parametrization".into())),
        }
    }

    pub fn parse(&self, text: &str) -> Result<DiffForm> {
        self.to_work(&self.spec().parse(text)?)
    }

    /// Print a working form, in ambient coordinates when that is possible.
    pub fn print(&self, u: &DiffForm) -> String {
        match self.to_ambient(u) {
            Ok(a) => self.spec().print(&a),
            Err(_) => self.spec().print(u),
        }
    }

    /// Generators of Ω^q/torsion in working coordinates.
    pub fn omega_gens(&self, q: usize) -> Result<Vec<DiffForm>> {
        let spec = self.spec();
        let n = spec.nvars();
        let all: Vec<usize> = (0..n).collect();
        let mut out: Vec<DiffForm> = Vec::new();
        for j in subsets(&all, q) {
            let mut u = DiffForm::one(n, Coords::Ambient);
            for &i in &j {
                u = u.wedge(&DiffForm::differential(n, i, Coords::Ambient))?;
            }
            let w = self.to_work(&u)?;
            if !w.is_zero() && !out.contains(&w) {
                out.push(w);
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, a: &DiffForm, b: &DiffForm) -> Result<DiffForm> {
        let w = a.wedge(b)?;
        Ok(match self {
            Model::Param(_) => w,
            Model::Ambient(m) => m.reduce(&w),
        })
    }

    pub fn d(&self, a: &DiffForm) -> Result<DiffForm> {
        match self {
            Model::Param(_) => Ok(a.d()),
            Model::Ambient(m) => m.to_work(&a.d()),
        }
    }

    pub fn reduce_fn(&self, f: &MeroFunction) -> MeroFunction {
        match self {
            Model::Param(_) => f.clone(),
            Model::Ambient(m) => m.reduce_fn(f),
        }
    }

    /// Coordinates of the positions (index lists) of degree-q working forms.
    pub fn positions(&self, q: usize) -> Vec<Vec<usize>> {
        match self {
            Model::Param(m) => subsets(&(0..m.s).collect::<Vec<_>>(), q),
            Model::Ambient(m) => {
                let keep: Vec<usize> = (0..m.n).filter(|&i| i != m.e).collect();
                subsets(&keep, q)
            }
        }
    }

    /// Equality of working forms. Normal forms are canonical because the leading
    /// term of f avoids the pole variables, but the difference is reduced anyway.
    pub fn equal(&self, a: &DiffForm, b: &DiffForm) -> bool {
        match a.sub(b) {
            Ok(diff) => self.is_zero(&diff),
            Err(_) => false,
        }
    }

    pub fn is_zero(&self, a: &DiffForm) -> bool {
        match self {
            Model::Param(_) => a.is_zero(),
            Model::Ambient(m) => m.reduce(a).is_zero(),
        }
    }

    pub fn param(&self) -> Option<&ParamModel> {
        match self {
            Model::Param(m) => Some(m),
            _ => None,
        }
    }

    pub fn ambient(&self) -> Option<&AmbientModel> {
        match self {
            Model::Ambient(m) => Some(m),
            _ => None,
        }
    }
}

/// Cover model for monomial parametrizations x_i = c_i t^{deg_i}.
pub struct ParamModel {
    pub spec: VarietySpec,
    pub s: usize,
    pub comps: Vec<Polynomial>,
    pub degs: Vec<Vec<i64>>,
    pub consts: Vec<Rational>,
    /// base[j]: ambient variable that is a pure power of t_j.
    pub base: Vec<usize>,
    pub e: Vec<i64>,
    semigroup: Mutex<HashMap<Vec<i64>, Option<Vec<u32>>>>,
}

impl ParamModel {
    pub fn new(spec: &VarietySpec) -> Result<ParamModel> {
        let p = spec.parametrization.as_ref().unwrap();
        let s = p.params.len();
        let mut degs = Vec::new();
        let mut consts = Vec::new();
        for c in &p.components {
            let (e, k) = c
                .as_term()
                .ok_or_else(|| Error::Unsupported(format!("{}: parametrization component {} is not a monomial", spec.id, c)))?;
            degs.push(e.iter().map(|&x| x as i64).collect::<Vec<i64>>());
            consts.push(k.clone());
        }
        let mut base = Vec::new();
        let mut e = Vec::new();
        for j in 0..s {
            let best = degs
                .iter()
                .enumerate()
                .filter(|(_, d)| d[j] > 0 && d.iter().enumerate().all(|(l, &x)| l == j || x == 0))
                .min_by_key(|(i, d)| (d[j], *i));
            match best {
                Some((i, d)) => {
                    base.push(i);
                    e.push(d[j]);
                }
                None => {
                    return Err(Error::Unsupported(format!(
                        "{}: no coordinate is a pure power of parameter {}",
                        spec.id, p.params[j]
                    )))
                }
            }
        }
        Ok(ParamModel { spec: spec.clone(), s, comps: p.components.clone(), degs, consts, base, e, semigroup: Mutex::new(HashMap::new()) })
    }

    fn to_work(&self, u: &DiffForm) -> Result<DiffForm> {
        match u.coords() {
            Coords::Parameter => {
                if u.nvars() != self.s {
                    return Err(Error::CoordMismatch(format!("{} parameters expected", self.s)));
                }
                Ok(u.clone())
            }
            Coords::Ambient => {
                if u.nvars() != self.spec.nvars() {
                    return Err(Error::CoordMismatch(format!("{} ambient variables expected", self.spec.nvars())));
                }
                u.substitute(&self.comps, self.s, Coords::Parameter, None)
            }
        }
    }

    /// Multidegree of t^β dt_I: β + 1_I.
    pub fn multidegree(beta: &[i64], idx: &[usize]) -> Vec<i64> {
        let mut d = beta.to_vec();
        for &i in idx {
            d[i] += 1;
        }
        d
    }

    /// Split a working form into multihomogeneous parts.
    pub fn homogeneous_parts(&self, u: &DiffForm) -> BTreeMap<Vec<i64>, DiffForm> {
        let mut out: BTreeMap<Vec<i64>, BTreeMap<Vec<usize>, Vec<(Vec<i64>, Rational)>>> = BTreeMap::new();
        for (idx, f) in u.components() {
            for (beta, c) in f.laurent_terms() {
                let d = Self::multidegree(&beta, idx);
                out.entry(d).or_default().entry(idx.clone()).or_default().push((beta, c));
            }
        }
        out.into_iter()
            .map(|(d, comps)| {
                let comps = comps.into_iter().map(|(i, ts)| (i, MeroFunction::from_laurent(self.s, ts))).collect();
                (d, DiffForm::from_components(self.s, u.degree(), Coords::Parameter, comps))
            })
            .collect()
    }

    /// Coefficient vector of a homogeneous form: position I ↦ coefficient of t^{d-1_I} dt_I.
    pub fn vector(&self, u: &DiffForm) -> SparseVec<Vec<usize>> {
        let mut v = SparseVec::new();
        for (idx, f) in u.components() {
            for (_, c) in f.laurent_terms() {
                v.insert(idx.clone(), c);
            }
        }
        v
    }

    /// The form Σ v_I t^{d-1_I} dt_I.
    pub fn from_vector(&self, d: &[i64], q: usize, v: &SparseVec<Vec<usize>>) -> DiffForm {
        let mut comps = BTreeMap::new();
        for (idx, c) in v {
            let mut beta = d.to_vec();
            for &i in idx {
                beta[i] -= 1;
            }
            comps.insert(idx.clone(), MeroFunction::laurent_monomial(self.s, &beta, c.clone()));
        }
        DiffForm::from_components(self.s, q, Coords::Parameter, comps)
    }

    pub fn is_homogeneous(&self, u: &DiffForm) -> Option<Vec<i64>> {
        let parts = self.homogeneous_parts(u);
        if parts.len() == 1 {
            parts.into_keys().next()
        } else {
            None
        }
    }

    /// Deck-invariant multidegree.
    pub fn invariant(&self, d: &[i64]) -> bool {
        self.spec.deck.as_ref().map(|g| g.character(d) == 0).unwrap_or(true)
    }

    /// Positions I with t^{d-1_I} dt_I holomorphic.
    pub fn holomorphic_positions(&self, d: &[i64], q: usize) -> Vec<Vec<usize>> {
        subsets(&(0..self.s).collect::<Vec<_>>(), q)
            .into_iter()
            .filter(|idx| idx.iter().all(|&i| d[i] >= 1) && d.iter().all(|&x| x >= 0))
            .collect()
    }

    /// Exponents γ with Σ γ_i deg_i = e, if e lies in the degree semigroup.
    pub fn semigroup(&self, e: &[i64]) -> Option<Vec<u32>> {
        if e.iter().any(|&x| x < 0) {
            return None;
        }
        if let Some(r) = self.semigroup.lock().unwrap().get(e) {
            return r.clone();
        }
        let r = if e.iter().all(|&x| x == 0) {
            Some(vec![0; self.degs.len()])
        } else {
            let mut found = None;
            for (i, d) in self.degs.iter().enumerate() {
                if d.iter().all(|&x| x == 0) {
                    continue;
                }
                let rest: Vec<i64> = e.iter().zip(d).map(|(a, b)| a - b).collect();
                if rest.iter().any(|&x| x < 0) {
                    continue;
                }
                if let Some(mut g) = self.semigroup(&rest) {
                    g[i] += 1;
                    found = Some(g);
                    break;
                }
            }
            found
        };
        self.semigroup.lock().unwrap().insert(e.to_vec(), r.clone());
        r
    }

    /// Pullback constant of x^γ.
    pub fn monomial_const(&self, g: &[i64]) -> Rational {
        let mut c = Rational::one();
        for (k, &x) in self.consts.iter().zip(g) {
            if x >= 0 {
                for _ in 0..x {
                    c *= k;
                }
            } else {
                for _ in 0..(-x) {
                    c /= k;
                }
            }
        }
        c
    }

    /// Laurent monomial x^γ (γ may be negative on pole variables) pulling back to t^target.
    fn ambient_exponents(&self, target: &[i64]) -> Option<Vec<i64>> {
        let n = self.degs.len();
        let nonbase: Vec<usize> = (0..n).filter(|i| !self.base.contains(i)).collect();
        let bound = target.iter().map(|x| x.abs()).max().unwrap_or(0) + 2 * self.e.iter().max().copied().unwrap_or(1) + 2;
        let mut best: Option<(i64, i64, Vec<i64>)> = None;
        let mut cur = vec![-bound; nonbase.len()];
        loop {
            let mut g = vec![0i64; n];
            let mut rest = target.to_vec();
            for (k, &i) in nonbase.iter().enumerate() {
                g[i] = cur[k];
                for j in 0..self.s {
                    rest[j] -= cur[k] * self.degs[i][j];
                }
            }
            if (0..self.s).all(|j| rest[j] % self.e[j] == 0) {
                for j in 0..self.s {
                    g[self.base[j]] += rest[j] / self.e[j];
                }
                let poles_ok = g.iter().enumerate().all(|(i, &x)| x >= 0 || self.spec.poles[i]);
                if poles_ok {
                    let neg_base = self.base.iter().filter(|&&i| g[i] < 0).count() as i64;
                    let size: i64 = g.iter().map(|x| x.abs()).sum();
                    let key = (neg_base, size);
                    if best.as_ref().map(|b| key < (b.0, b.1)).unwrap_or(true) {
                        best = Some((key.0, key.1, g));
                    }
                }
            }
            // advance odometer
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return best.map(|b| b.2);
                }
                cur[k] += 1;
                if cur[k] <= bound {
                    break;
                }
                cur[k] = -bound;
                k += 1;
            }
        }
    }

    /// Express a cover form in ambient coordinates using dx_{base(j)} for dt_j.
    pub fn to_ambient(&self, u: &DiffForm) -> Result<DiffForm> {
        let n = self.spec.nvars();
        let mut out = DiffForm::zero(n, u.degree(), Coords::Ambient);
        for (idx, f) in u.components() {
            for (beta, c) in f.laurent_terms() {
                // dt_j = dx_b / (c_b e_j t_j^{e_j - 1})
                let mut tgt = beta.clone();
                let mut k = c.clone();
                for &j in idx {
                    tgt[j] -= self.e[j] - 1;
                    k /= &self.consts[self.base[j]] * rat(self.e[j]);
                }
                let g = self.ambient_exponents(&tgt).ok_or_else(|| {
                    Error::Unsupported(format!("{}: cover term has no monomial ambient expression", self.spec.id))
                })?;
                k /= self.monomial_const(&g);
                let amb_idx: Vec<usize> = idx.iter().map(|&j| self.base[j]).collect();
                let term = DiffForm::term(MeroFunction::laurent_monomial(n, &g, k), &amb_idx, Coords::Ambient);
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }
}

/// Eliminated ambient model for a hypersurface f = 0.
pub struct AmbientModel {
    pub spec: VarietySpec,
    pub n: usize,
    pub f: Polynomial,
    /// Index of the eliminated differential.
    pub e: usize,
    pub order: MonomialOrder,
    theta: DiffForm,
    basis: Vec<Polynomial>,
}

impl AmbientModel {
    pub fn new(spec: &VarietySpec) -> Result<AmbientModel> {
        if spec.equations.len() != 1 {
            return Err(Error::Unsupported(format!("{}: ambient model needs exactly one equation", spec.id)));
        }
        let f = spec.equations[0].clone();
        let n = spec.nvars();
        let is_pole_monomial = |p: &Polynomial| {
            p.as_term().map(|(e, _)| e.iter().enumerate().all(|(i, &x)| x == 0 || spec.poles[i])).unwrap_or(false)
        };
        let e = (0..n)
            .find(|&i| is_pole_monomial(&f.derivative(i)))
            .ok_or_else(|| Error::Unsupported(format!("{}: no partial derivative is a pole monomial", spec.id)))?;
        let lt_ok = |o: MonomialOrder| {
            f.leading(o).map(|(m, _)| m.iter().enumerate().all(|(i, &x)| x == 0 || !spec.poles[i])).unwrap_or(false)
        };
        let order = [MonomialOrder::DegRevLex, MonomialOrder::Lex]
            .into_iter()
            .find(|&o| lt_ok(o))
            .ok_or_else(|| Error::Unsupported(format!("{}: leading term of the equation meets the pole variables", spec.id)))?;
        let fe = f.derivative(e);
        let (de, ce) = fe.as_term().map(|(a, b)| (a.clone(), b.clone())).unwrap();
        let mut theta = DiffForm::zero(n, 1, Coords::Ambient);
        for j in 0..n {
            if j == e {
                continue;
            }
            let fj = f.derivative(j);
            if fj.is_zero() {
                continue;
            }
            let coef = MeroFunction::new(fj.scale(&(-ce.recip())), de.clone());
            theta = theta.add(&DiffForm::term(coef, &[j], Coords::Ambient))?;
        }
        let basis = vec![f.make_monic(order)];
        Ok(AmbientModel { spec: spec.clone(), n, f, e, order, theta, basis })
    }

    pub fn reduce_fn(&self, g: &MeroFunction) -> MeroFunction {
        MeroFunction::new(normal_form(g.numerator(), &self.basis, self.order), g.denominator().clone())
    }

    pub fn reduce(&self, u: &DiffForm) -> DiffForm {
        u.map_coeffs(|g| self.reduce_fn(g))
    }

    fn to_work(&self, u: &DiffForm) -> Result<DiffForm> {
        if u.coords() != Coords::Ambient || u.nvars() != self.n {
            return Err(Error::CoordMismatch(format!("{} expects ambient forms in {} variables", self.spec.id, self.n)));
        }
        let mut out = DiffForm::zero(self.n, u.degree(), Coords::Ambient);
        for (idx, g) in u.components() {
            match idx.iter().position(|&i| i == self.e) {
                None => out = out.add(&DiffForm::term(g.clone(), idx, Coords::Ambient))?,
                Some(pos) => {
                    let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != self.e).collect();
                    let mut t = DiffForm::function(g.clone(), Coords::Ambient).wedge(&self.theta)?;
                    for &i in &rest {
                        t = t.wedge(&DiffForm::differential(self.n, i, Coords::Ambient))?;
                    }
                    if pos % 2 == 1 {
                        t = t.neg();
                    }
                    out = out.add(&t)?;
                }
            }
        }
        Ok(self.reduce(&out))
    }
}

/// A finitely generated O-module of degree-q forms, in working coordinates.
pub struct OModule {
    model: Arc<Model>,
    q: usize,
    gens: Vec<DiffForm>,
    kind: ModKind,
}

enum ModKind {
    Param { hgens: Vec<(Vec<i64>, SparseVec<Vec<usize>>)> },
    Ambient { cache: Mutex<Option<(Vec<u32>, Arc<ModuleBasis>)>> },
}

impl OModule {
    pub fn new(model: Arc<Model>, q: usize, gens: Vec<DiffForm>) -> Result<OModule> {
        for g in &gens {
            if g.degree() != q && !g.is_zero() {
                return Err(Error::CoordMismatch(format!("generator of degree {} in a degree-{} module", g.degree(), q)));
            }
            if g.coords() != model.work_coords() {
                return Err(Error::CoordMismatch("generators must be in working coordinates".into()));
            }
        }
        let kind = match &*model {
            Model::Param(pm) => {
                let mut hgens = Vec::new();
                for g in &gens {
                    if g.is_zero() {
                        continue;
                    }
                    let d = pm.is_homogeneous(g).ok_or_else(|| Error::Unsupported("non-homogeneous module generator".into()))?;
                    hgens.push((d, pm.vector(g)));
                }
                ModKind::Param { hgens }
            }
            Model::Ambient(_) => ModKind::Ambient { cache: Mutex::new(None) },
        };
        Ok(OModule { model, q, gens, kind })
    }

    pub fn gens(&self) -> &[DiffForm] {
        &self.gens
    }

    /// Multidegree and coefficient vector of each non-zero generator (cover model only).
    pub fn graded_gens(&self) -> &[(Vec<i64>, SparseVec<Vec<usize>>)] {
        match &self.kind {
            ModKind::Param { hgens } => hgens,
            ModKind::Ambient { .. } => &[],
        }
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    /// Spanning vectors of the degree-d part (cover model).
    fn graded_span(&self, d: &[i64]) -> EchelonBasis<Vec<usize>> {
        let pm = self.model.param().unwrap();
        let mut eb = EchelonBasis::new();
        if let ModKind::Param { hgens } = &self.kind {
            for (dg, v) in hgens {
                let diff: Vec<i64> = d.iter().zip(dg).map(|(a, b)| a - b).collect();
                if pm.semigroup(&diff).is_some() {
                    eb.insert(v);
                }
            }
        }
        eb
    }

    /// Degree-d part as a subspace of the holomorphic vectors.
    pub fn part(&self, d: &[i64]) -> EchelonBasis<Vec<usize>> {
        self.graded_span(d)
    }

    pub fn contains(&self, u: &DiffForm) -> Result<bool> {
        Ok(self.witness(u, false)?.is_some())
    }

    /// Ambient polynomial coefficients c_i with u = Σ c_i g_i, if u is a member.
    pub fn membership(&self, u: &DiffForm) -> Result<Option<Vec<Polynomial>>> {
        self.witness(u, true)
    }

    fn witness(&self, u: &DiffForm, track: bool) -> Result<Option<Vec<Polynomial>>> {
        let n_amb = self.model.spec().nvars();
        let u = if u.coords() == self.model.work_coords() { u.clone() } else { self.model.to_work(u)? };
        if u.is_zero() {
            return Ok(Some(vec![Polynomial::zero(n_amb); self.gens.len()]));
        }
        if u.degree() != self.q {
            return Err(Error::CoordMismatch(format!("form of degree {} against a degree-{} module", u.degree(), self.q)));
        }
        match (&*self.model, &self.kind) {
            (Model::Param(pm), ModKind::Param { hgens }) => {
                let mut coeffs = vec![Polynomial::zero(n_amb); self.gens.len()];
                // hgens skips zero generators; map back to indices
                let live: Vec<usize> = (0..self.gens.len()).filter(|&i| !self.gens[i].is_zero()).collect();
                for (d, part) in pm.homogeneous_parts(&u) {
                    let v = pm.vector(&part);
                    if part.components().values().any(|f| !f.is_polynomial()) {
                        return Ok(None);
                    }
                    let mut eb = EchelonBasis::new();
                    let mut used = Vec::new();
                    for (k, (dg, gv)) in hgens.iter().enumerate() {
                        let diff: Vec<i64> = d.iter().zip(dg).map(|(a, b)| a - b).collect();
                        if let Some(g) = pm.semigroup(&diff) {
                            eb.insert(gv);
                            used.push((k, g));
                        }
                    }
                    let (rem, combo) = eb.reduce(&v);
                    if !rem.is_empty() {
                        return Ok(None);
                    }
                    if track {
                        for (slot, c) in combo {
                            let (k, g) = &used[slot];
                            let gi: Vec<i64> = g.iter().map(|&x| x as i64).collect();
                            let scale = c / pm.monomial_const(&gi);
                            let mono = Polynomial::monomial(n_amb, g.clone(), scale);
                            coeffs[live[*k]] = &coeffs[live[*k]] + &mono;
                        }
                    }
                }
                Ok(Some(coeffs))
            }
            (Model::Ambient(am), ModKind::Ambient { cache }) => {
                let pos = self.model.positions(self.q);
                // Scale everything by one monomial N dividing out all denominators;
                // the basis for N is reused while later elements need no larger N.
                let mut m = crate::mero::lcm_denominators(am.n, u.components().values());
                for g in &self.gens {
                    let dg = crate::mero::lcm_denominators(am.n, g.components().values());
                    for (a, b) in m.iter_mut().zip(dg) {
                        *a = (*a).max(b);
                    }
                }
                let mut cache = cache.lock().unwrap();
                if let Some((n, _)) = cache.as_ref() {
                    if n.iter().zip(&m).all(|(a, b)| a >= b) {
                        m = n.clone();
                    } else {
                        for (a, b) in m.iter_mut().zip(n) {
                            *a = (*a).max(*b);
                        }
                    }
                }
                let vec_of = |w: &DiffForm| -> ModuleVec {
                    pos.iter()
                        .map(|idx| match w.components().get(idx) {
                            Some(f) => normal_form(&f.numerator_over(&m), &am.basis, am.order),
                            None => Polynomial::zero(am.n),
                        })
                        .collect()
                };
                let target = vec_of(&u);
                let build = |track: bool| {
                    let mut gv: Vec<ModuleVec> = self.gens.iter().map(|g| vec_of(g)).collect();
                    for i in 0..pos.len() {
                        let mut v = vec![Polynomial::zero(am.n); pos.len()];
                        v[i] = am.f.clone();
                        gv.push(v);
                    }
                    Arc::new(ModuleBasis::new(&gv, pos.len(), am.n, MonomialOrder::DegRevLex, track))
                };
                let mb = if track {
                    build(true)
                } else {
                    match cache.as_ref() {
                        Some((n, b)) if *n == m => b.clone(),
                        _ => {
                            let b = build(false);
                            *cache = Some((m.clone(), b.clone()));
                            b
                        }
                    }
                };
                drop(cache);
                let (rem, w) = mb.reduce(&target);
                if rem.iter().any(|p| !p.is_zero()) {
                    return Ok(None);
                }
                Ok(Some(match w {
                    Some(mut w) => {
                        w.truncate(self.gens.len());
                        w
                    }
                    None => vec![Polynomial::zero(am.n); self.gens.len()],
                }))
            }
            _ => unreachable!(),
        }
    }

    /// Both modules contain each other's generators.
    pub fn equals(&self, other: &OModule) -> Result<bool> {
        for g in other.gens() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        for g in self.gens() {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::builtin;

    fn model(id: &str) -> Arc<Model> {
        Arc::new(Model::new(&builtin(id).unwrap()).unwrap())
    }

    #[test]
    fn sk_top_forms_on_the_cover() {
        for k in 2..=6 {
            let m = model(&format!("S({})", k));
            let g = m.omega_gens(2).unwrap();
            // a^k, b^k, (ab)^{k-1} times da^db up to units
            let mut degs: Vec<Vec<i64>> = g.iter().map(|u| m.param().unwrap().is_homogeneous(u).unwrap()).collect();
            degs.sort();
            assert_eq!(degs, vec![vec![1, k + 1], vec![k, k], vec![k + 1, 1]]);
        }
    }

    #[test]
    fn sk_membership_of_cover_monomials() {
        let m = model("S(4)");
        let omega = OModule::new(m.clone(), 2, m.omega_gens(2).unwrap()).unwrap();
        let ab = |e: i64| m.parse(&format!("a^{}*b^{}*da^db", e, e)).unwrap();
        assert!(omega.contains(&ab(3)).unwrap());
        assert!(!omega.contains(&ab(1)).unwrap());
        let w = omega.membership(&ab(5)).unwrap().unwrap();
        let recon = w.iter().zip(omega.gens()).fold(DiffForm::zero(2, 2, Coords::Parameter), |acc, (c, g)| {
            let cw = m.to_work(&DiffForm::poly(c.clone(), Coords::Ambient)).unwrap();
            acc.add(&cw.wedge(g).unwrap()).unwrap()
        });
        assert_eq!(recon, ab(5));
    }

    #[test]
    fn cover_forms_return_to_ambient() {
        let m = model("S(4)");
        for s in ["x*dy/z^2", "dx^dy/z", "y*dz", "dx^dz"] {
            let u = m.parse(s).unwrap();
            let back = m.to_ambient(&u).unwrap();
            assert_eq!(m.to_work(&back).unwrap(), u, "{}", s);
        }
        let c = model("curve35");
        let t = c.parse("t*dt").unwrap();
        assert_eq!(c.to_work(&c.to_ambient(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn ambient_relations_on_fermat() {
        let m = model("Fermat(4)");
        // a^3 da^db = z^3 dz^db
        let a = m.parse("a^3*da^db").unwrap();
        let b = m.parse("z^3*dz^db").unwrap();
        assert_eq!(a, b);
        let omega = OModule::new(m.clone(), 2, m.omega_gens(2).unwrap()).unwrap();
        assert!(omega.contains(&m.parse("b*dz^da").unwrap()).unwrap());
        assert!(!omega.contains(&m.parse("a*b*da^db/z").unwrap()).unwrap());
    }

    #[test]
    fn mk_relation_for_dv() {
        let m = model("M(3)");
        let lhs = m.parse("y*dx + x*dy").unwrap();
        let rhs = m.parse("3*u^2*v*du + u^3*dv").unwrap();
        assert_eq!(lhs, rhs);
    }
}
