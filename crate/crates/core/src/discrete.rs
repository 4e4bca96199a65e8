//! Discrete-time variational problems `sum_k L(k, x[k], ..., x[k+m])`.

use std::collections::{BTreeMap, HashMap};

use lagsym_expr::{
    collect_independent, diff, eval_exact, map_symbols, BigRational, Expr, F64Fn, Monomial, Symbol,
};
use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::symmetry::{certify, linear_row, AnsatzSpec};

#[derive(Clone, Debug)]
pub struct DiscreteLagrangian {
    pub expr: Expr,
    pub k: Symbol,
    pub vars: Vec<String>,
    pub order: u32,
    pub params: Vec<Symbol>,
}

impl DiscreteLagrangian {
    /// Parses `src`, reading a bare variable name as `x[k]`. The order is
    /// the largest shift unless `order` raises it.
    pub fn parse(src: &str, k: &str, vars: &[&str], params: &[&str], order: Option<u32>) -> Result<Self> {
        let raw = lagsym_expr::parse(src)?;
        let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        let expr = map_symbols(&raw, &|s| {
            (s.shift().is_none() && s.deriv_order() == 0 && names.iter().any(|v| v == s.name()))
                .then(|| Expr::sym(Symbol::shifted(s.name(), 0)))
        });
        let mut l = DiscreteLagrangian {
            expr,
            k: Symbol::new(k),
            vars: names,
            order: 0,
            params: params.iter().map(|p| Symbol::new(p)).collect(),
        };
        l.check_context()?;
        let detected = l.max_shift(&l.expr);
        l.order = match order {
            Some(m) if m < detected => return Err(CoreError::OrderTooLow { requested: m, detected }),
            Some(m) => m,
            None => detected,
        };
        if l.order == 0 {
            return Err(CoreError::OrderZero);
        }
        Ok(l)
    }

    fn check_context(&self) -> Result<()> {
        if self.vars.is_empty() {
            return Err(CoreError::NoDependentVariable);
        }
        let mut names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        names.push(self.k.name());
        names.extend(self.params.iter().map(Symbol::name));
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(CoreError::InvalidContext("index, variable and parameter names must be distinct".into()));
        }
        for s in self.expr.free_symbols() {
            let ok = match s.shift() {
                Some(j) => j >= 0 && s.deriv_order() == 0 && self.var_index(s.name()).is_some(),
                None => s == self.k || self.params.contains(&s),
            };
            if !ok {
                return Err(CoreError::InvalidContext(format!("unexpected symbol {}", s.to_text())));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// `x_v[k + j]`.
    pub fn at(&self, v: usize, j: i64) -> Symbol {
        Symbol::shifted(&self.vars[v], j)
    }

    fn max_shift(&self, e: &Expr) -> u32 {
        e.free_symbols().iter().filter_map(Symbol::shift).max().unwrap_or(0).max(0) as u32
    }

    /// `dL/dx_v[k+j]`.
    pub fn partial(&self, v: usize, j: u32) -> Expr {
        diff(&self.expr, &self.at(v, j as i64))
    }

    /// Rewrites `k -> k + s` and `x[k+j] -> x[k+j+s]`.
    pub fn shift(&self, e: &Expr, s: i64) -> Expr {
        if s == 0 {
            return e.clone();
        }
        let k = &self.k;
        map_symbols(e, &|sym| {
            if sym.shift().is_some() {
                Some(Expr::sym(sym.shifted_by(s)))
            } else if sym == k {
                Some(Expr::sym(k.clone()) + Expr::int(s))
            } else {
                None
            }
        })
    }

    /// Evaluates a generator component `X(k, x)` at `(k + j, x[k + j])`.
    pub fn generator_at(&self, x: &Expr, j: i64) -> Expr {
        let k = &self.k;
        map_symbols(x, &|sym| {
            if sym.shift().is_none() && self.var_index(sym.name()).is_some() {
                Some(Expr::sym(Symbol::shifted(sym.name(), j)))
            } else if sym == k && j != 0 {
                Some(Expr::sym(k.clone()) + Expr::int(j))
            } else {
                None
            }
        })
    }

    /// Rejects components that mention shifted values or unknown symbols.
    pub fn validate_generator(&self, g: &[Expr]) -> Result<()> {
        if g.len() != self.n() {
            return Err(CoreError::GeneratorArity { expected: self.n(), got: g.len() });
        }
        for c in g {
            for s in c.free_symbols() {
                if s.shift().is_some() || s.deriv_order() > 0 {
                    return Err(CoreError::GeneratorHasJets(c.to_string()));
                }
                if !(s == self.k || self.params.contains(&s) || self.var_index(s.name()).is_some()) {
                    return Err(CoreError::InvalidContext(format!("unexpected symbol {} in generator", s.to_text())));
                }
            }
        }
        Ok(())
    }

    fn depends_on_state(&self) -> bool {
        self.expr.any_symbol(&|s| s.shift().is_some())
    }
}

/// `EL_v = sum_j dL/dx_v[k+j]` shifted by `m - j`, one entry per variable.
pub fn discrete_euler_lagrange(l: &DiscreteLagrangian) -> Vec<Expr> {
    let m = l.order;
    (0..l.n())
        .map(|v| Expr::add_all((0..=m).map(|j| l.shift(&l.partial(v, j), (m - j) as i64))))
        .collect()
}

/// `sum_v sum_j dL/dx_v[k+j] X_v(k+j, x[k+j])`.
pub fn discrete_invariance_residual(l: &DiscreteLagrangian, g: &[Expr]) -> Result<Expr> {
    l.validate_generator(g)?;
    let mut terms = Vec::new();
    for (v, x) in g.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for j in 0..=l.order {
            terms.push(l.partial(v, j) * l.generator_at(x, j as i64));
        }
    }
    Ok(Expr::add_all(terms))
}

#[derive(Clone, Debug)]
pub struct DiscreteFamily {
    pub basis: Vec<Vec<Expr>>,
    pub labels: Vec<String>,
    pub ansatz: AnsatzSpec,
    /// `L` does not depend on the sequence, so every generator is admissible.
    pub degenerate: bool,
}

impl DiscreteFamily {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn combined(&self, n: usize) -> Vec<Expr> {
        let mut out = vec![Expr::zero(); n];
        for (g, c) in self.basis.iter().zip(&self.labels) {
            for (o, x) in out.iter_mut().zip(g) {
                *o = &*o + x * Expr::symbol(c);
            }
        }
        out
    }
}

/// The default discrete ansatz: polynomials of degree 2 in `(k, x)`, no atoms.
pub fn discrete_ansatz(degree: u32) -> AnsatzSpec {
    AnsatzSpec { degree, atoms: Vec::new(), overrides: HashMap::new() }
}

/// Null space of the invariance condition over a polynomial basis in
/// `(k, x)`, with `k` and every `x[k+j]` treated as independent.
pub fn discrete_solve_generators(l: &DiscreteLagrangian, spec: &AnsatzSpec, seed: u64) -> Result<DiscreteFamily> {
    let n = l.n();
    let base: Vec<Symbol> = std::iter::once(l.k.clone()).chain(l.vars.iter().map(|v| Symbol::new(v))).collect();
    let shared = spec.basis(&base);
    let mut columns: Vec<(usize, Expr)> = Vec::new();
    for v in (0..n).rev() {
        let basis = match spec.overrides.get(&l.vars[v]) {
            Some(b) => {
                let mut b = b.clone();
                b.sort();
                b.dedup();
                b
            }
            None => shared.clone(),
        };
        columns.extend(basis.into_iter().map(|b| (v, b)));
    }
    if columns.is_empty() {
        return Err(CoreError::EmptyAnsatz);
    }
    let unit = |(v, b): &(usize, Expr)| {
        let mut g = vec![Expr::zero(); n];
        g[*v] = b.clone();
        g
    };

    let mut collect_vars = vec![l.k.clone()];
    for v in 0..n {
        collect_vars.extend((0..=l.order as i64).map(|j| l.at(v, j)));
    }
    let unknowns: Vec<Symbol> = (0..columns.len()).map(|j| Symbol::new(&format!("u_{j}"))).collect();
    let index: HashMap<Symbol, usize> = unknowns.iter().cloned().enumerate().map(|(j, s)| (s, j)).collect();
    let mut rows_by_key: BTreeMap<Monomial, Vec<Expr>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        let r = discrete_invariance_residual(l, &unit(col))?;
        let u = Expr::sym(unknowns[j].clone());
        for (m, c) in collect_independent(&r, &collect_vars) {
            rows_by_key.entry(m).or_default().push(c * &u);
        }
    }
    let mut matrix = Vec::new();
    for terms in rows_by_key.into_values() {
        let row = linear_row(&Expr::add_all(terms), &index, columns.len())?;
        if row.iter().any(|e| !e.is_zero()) {
            matrix.push(row);
        }
    }

    let ech = linalg::reduce(matrix, columns.len(), seed);
    let mut basis = Vec::new();
    for (_, coeffs) in linalg::null_space(&ech, columns.len()).into_iter().rev() {
        let mut g = vec![Expr::zero(); n];
        for (col, c) in columns.iter().zip(&coeffs) {
            if !c.is_zero() {
                g[col.0] = &g[col.0] + &col.1 * c;
            }
        }
        certify(&discrete_invariance_residual(l, &g)?, seed)?;
        basis.push(g);
    }
    let degenerate = !l.depends_on_state();
    if degenerate {
        log::warn!("the cost function does not depend on the sequence; every generator is admissible");
    }
    let labels = (1..=basis.len()).map(|i| format!("C{i}")).collect();
    Ok(DiscreteFamily { basis, labels, ansatz: spec.clone(), degenerate })
}

#[derive(Clone, Debug)]
pub struct DiscreteConservationLaw {
    /// Over `k` and shifts `0..m-1`.
    pub phi: Expr,
    pub generator: Vec<Expr>,
    /// `psi[j][v]` for `j < m`.
    pub psi: Vec<Vec<Expr>>,
    pub invariant: bool,
}

/// `Psi^0 = dL/dx[k]`, `Psi^j = Psi^(j-1)(k+1) + dL/dx[k+j]`.
pub fn discrete_psi(l: &DiscreteLagrangian) -> Vec<Vec<Expr>> {
    let mut out: Vec<Vec<Expr>> = vec![(0..l.n()).map(|v| l.partial(v, 0)).collect()];
    for j in 1..l.order {
        let prev = &out[j as usize - 1];
        let cur = (0..l.n()).map(|v| l.shift(&prev[v], 1) + l.partial(v, j)).collect();
        out.push(cur);
    }
    out
}

/// `phi = sum_{j<m} sum_v Psi^j_v(k) X_v(k+j, x[k+j])`.
pub fn discrete_noether(l: &DiscreteLagrangian, g: &[Expr], seed: u64) -> Result<DiscreteConservationLaw> {
    let residual = discrete_invariance_residual(l, g)?;
    let psi = discrete_psi(l);
    let mut terms = Vec::new();
    for (j, row) in psi.iter().enumerate() {
        for (v, p) in row.iter().enumerate() {
            if !g[v].is_zero() {
                terms.push(p * l.generator_at(&g[v], j as i64));
            }
        }
    }
    let invariant = certify(&residual, seed).is_ok();
    if !invariant {
        log::warn!("generator ({}) does not leave the cost function invariant", join(g));
    }
    Ok(DiscreteConservationLaw { phi: Expr::add_all(terms), generator: g.to_vec(), psi, invariant })
}

/// Options for [`discrete_verify`].
#[derive(Clone, Debug)]
pub struct DiscreteSetup {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// First index of the rolled sequence.
    pub k0: i64,
    pub params: HashMap<String, BigRational>,
}

impl DiscreteSetup {
    pub fn new(steps: usize, trials: usize, seed: u64) -> Self {
        DiscreteSetup { steps, trials, seed, k0: 1, params: HashMap::new() }
    }
}

#[derive(Clone, Debug)]
pub struct DiscreteReport {
    /// `max_k |phi(k) - phi(k0)|` over all trials.
    pub deviation: f64,
    /// Every trial ran in exact rational arithmetic.
    pub exact: bool,
}

const ROOT_TOL: f64 = 1e-12;

struct Recurrence<'a> {
    l: &'a DiscreteLagrangian,
    el: Vec<Expr>,
    tops: Vec<Symbol>,
    h: Vec<Vec<Expr>>,
    r: Vec<Expr>,
    linear: bool,
}

impl<'a> Recurrence<'a> {
    fn new(l: &'a DiscreteLagrangian) -> Self {
        let el = discrete_euler_lagrange(l);
        let tops: Vec<Symbol> = (0..l.n()).map(|v| l.at(v, 2 * l.order as i64)).collect();
        let zero: HashMap<Symbol, Expr> = tops.iter().map(|s| (s.clone(), Expr::zero())).collect();
        let h: Vec<Vec<Expr>> = el.iter().map(|e| tops.iter().map(|s| diff(e, s)).collect()).collect();
        let linear = h.iter().flatten().all(|c| !c.any_symbol(&|s| tops.contains(s)));
        let r = el.iter().map(|e| lagsym_expr::substitute(e, &zero)).collect();
        Recurrence { l, el, tops, h, r, linear }
    }

    /// Symbols that fix one step: `k`, then `x_v[k+j]` for `j < 2m`.
    fn window(&self) -> Vec<Symbol> {
        let mut out = vec![self.l.k.clone()];
        for v in 0..self.l.n() {
            out.extend((0..2 * self.l.order as i64).map(|j| self.l.at(v, j)));
        }
        out
    }
}

fn rational_solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for j in c..n {
                    let d = &f * &a[c][j];
                    a[r][j] -= d;
                }
                let d = &f * &b[c];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let q: i64 = rng.gen_range(1..=20);
    let p: i64 = rng.gen_range(-2 * q..=2 * q);
    BigRational::new(p.into(), q.into())
}

/// Runs one trial exactly; `None` when some quantity is not rational.
fn exact_trial(rec: &Recurrence, phi: &Expr, setup: &DiscreteSetup, init: &[Vec<BigRational>]) -> Result<Option<f64>> {
    let l = rec.l;
    let n = l.n();
    let width = 2 * l.order as usize;
    // seq[v][i] = x_v[k0 + i]
    let mut seq: Vec<Vec<BigRational>> = init.to_vec();
    let params: Vec<(Symbol, BigRational)> =
        l.params.iter().map(|p| (p.clone(), setup.params[p.name()].clone())).collect();
    let env_at = |seq: &Vec<Vec<BigRational>>, i: usize| {
        let mut env: HashMap<Symbol, BigRational> = params.iter().cloned().collect();
        env.insert(l.k.clone(), BigRational::from_integer((setup.k0 + i as i64).into()));
        for (v, s) in seq.iter().enumerate() {
            for j in 0..width.min(s.len() - i) {
                env.insert(l.at(v, j as i64), s[i + j].clone());
            }
        }
        env
    };
    let total = setup.steps + l.order as usize + width;
    while seq[0].len() < total {
        let i = seq[0].len() - width;
        let env = env_at(&seq, i);
        let mut a = Vec::with_capacity(n);
        for row in &rec.h {
            let mut vals = Vec::with_capacity(n);
            for c in row {
                match eval_exact(c, &env) {
                    Some(x) => vals.push(x),
                    None => return Ok(None),
                }
            }
            a.push(vals);
        }
        let mut b = Vec::with_capacity(n);
        for r in &rec.r {
            match eval_exact(r, &env) {
                Some(x) => b.push(-x),
                None => return Ok(None),
            }
        }
        let z = rational_solve(a, b)
            .ok_or_else(|| CoreError::Recurrence(format!("leading shift not solvable at k = {}", setup.k0 + i as i64)))?;
        for (v, x) in z.into_iter().enumerate() {
            seq[v].push(x);
        }
    }
    let mut phi0 = None;
    let mut dev = BigRational::zero();
    for i in 0..=setup.steps {
        let Some(p) = eval_exact(phi, &env_at(&seq, i)) else { return Ok(None) };
        match &phi0 {
            None => phi0 = Some(p),
            Some(p0) => {
                let d = (&p - p0).abs();
                if d > dev {
                    dev = d;
                }
            }
        }
    }
    Ok(Some(dev.to_f64().unwrap_or(f64::INFINITY)))
}

fn bisect(f: impl Fn(f64) -> f64, guess: f64) -> Option<f64> {
    let f0 = f(guess);
    if f0 == 0.0 {
        return Some(guess);
    }
    let mut width = 1.0;
    let (mut lo, mut hi) = loop {
        if width > 1e12 {
            return None;
        }
        let (a, b) = (guess - width, guess + width);
        if f(a).signum() != f0.signum() {
            break (a, guess);
        }
        if f(b).signum() != f0.signum() {
            break (guess, b);
        }
        width *= 2.0;
    };
    let flo = f(lo).signum();
    while hi - lo > ROOT_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn float_trial(rec: &Recurrence, phi: &Expr, setup: &DiscreteSetup, init: &[Vec<BigRational>]) -> Result<f64> {
    let l = rec.l;
    let n = l.n();
    let width = 2 * l.order as usize;
    let mut vars = rec.window();
    vars.extend(rec.tops.iter().cloned());
    vars.extend(l.params.iter().cloned());
    let params: Vec<f64> = l.params.iter().map(|p| setup.params[p.name()].to_f64().unwrap_or(f64::NAN)).collect();
    let el: Vec<F64Fn> = rec.el.iter().map(|e| F64Fn::compile(e, &vars)).collect::<std::result::Result<_, _>>()?;
    let h: Vec<F64Fn> = rec.h.iter().flatten().map(|e| F64Fn::compile(e, &vars)).collect::<std::result::Result<_, _>>()?;
    let r: Vec<F64Fn> = rec.r.iter().map(|e| F64Fn::compile(e, &vars)).collect::<std::result::Result<_, _>>()?;
    let phi_f = F64Fn::compile(phi, &vars)?;

    let mut seq: Vec<Vec<f64>> = init.iter().map(|s| s.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    let args_at = |seq: &Vec<Vec<f64>>, i: usize, top: &[f64]| {
        let mut a = vec![(setup.k0 + i as i64) as f64];
        for s in seq {
            a.extend((0..width).map(|j| s.get(i + j).copied().unwrap_or(0.0)));
        }
        a.extend_from_slice(top);
        a.extend_from_slice(&params);
        a
    };
    let total = setup.steps + l.order as usize + width;
    while seq[0].len() < total {
        let i = seq[0].len() - width;
        let z: Vec<f64> = if rec.linear {
            let args = args_at(&seq, i, &vec![0.0; n]);
            let a = DMatrix::from_fn(n, n, |p, q| h[p * n + q].eval(&args));
            let b = DVector::from_fn(n, |p, _| -r[p].eval(&args));
            let z = a.lu().solve(&b).ok_or_else(|| CoreError::Recurrence(format!("singular step at k = {}", setup.k0 + i as i64)))?;
            z.iter().copied().collect()
        } else if n == 1 {
            let guess = seq[0][i + width - 1];
            let f = |x: f64| el[0].eval(&args_at(&seq, i, &[x]));
            vec![bisect(f, guess).ok_or_else(|| CoreError::Recurrence(format!("no root at k = {}", setup.k0 + i as i64)))?]
        } else {
            return Err(CoreError::Recurrence("nonlinear recurrence in several variables".into()));
        };
        if z.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::Recurrence(format!("non-finite value at k = {}", setup.k0 + i as i64)));
        }
        for (v, x) in z.into_iter().enumerate() {
            seq[v].push(x);
        }
    }
    let top0 = vec![0.0; n];
    let phi0 = phi_f.eval(&args_at(&seq, 0, &top0));
    let mut dev: f64 = 0.0;
    for i in 0..=setup.steps {
        let p = phi_f.eval(&args_at(&seq, i, &top0));
        if !p.is_finite() {
            return Err(CoreError::Recurrence(format!("law undefined at k = {}", setup.k0 + i as i64)));
        }
        dev = dev.max((p - phi0).abs());
    }
    Ok(dev)
}

/// Rolls the discrete Euler-Lagrange recurrence from random rational
/// initial data and measures how far `phi` moves.
///
/// Exact rational arithmetic is used whenever the leading shift enters
/// linearly and all quantities stay rational; otherwise the step is solved
/// in floating point (bisection for nonlinear scalar recurrences).
pub fn discrete_verify(l: &DiscreteLagrangian, law: &DiscreteConservationLaw, setup: &DiscreteSetup) -> Result<DiscreteReport> {
    for p in &l.params {
        if !setup.params.contains_key(p.name()) {
            return Err(CoreError::InitialData(format!("missing value for parameter {}", p.name())));
        }
    }
    let rec = Recurrence::new(l);
    if rec.h.iter().flatten().all(Expr::is_zero) {
        return Err(CoreError::Recurrence("the leading shift does not occur in the equations".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let width = 2 * l.order as usize;
    let mut deviation: f64 = 0.0;
    let mut exact = true;
    for _ in 0..setup.trials.max(1) {
        let init: Vec<Vec<BigRational>> =
            (0..l.n()).map(|_| (0..width).map(|_| random_rational(&mut rng)).collect()).collect();
        let dev = match rec.linear.then(|| exact_trial(&rec, &law.phi, setup, &init)).transpose()?.flatten() {
            Some(d) => d,
            None => {
                exact = false;
                float_trial(&rec, &law.phi, setup, &init)?
            }
        };
        deviation = deviation.max(dev);
    }
    Ok(DiscreteReport { deviation, exact })
}

/// `phi(k+1) - phi(k) - sum_v EL_v(k) X_v(k+m) + R(k)`, identically zero.
pub fn telescoping_defect(l: &DiscreteLagrangian, law: &DiscreteConservationLaw) -> Result<Expr> {
    let el = discrete_euler_lagrange(l);
    let r = discrete_invariance_residual(l, &law.generator)?;
    let mut terms = vec![l.shift(&law.phi, 1), -law.phi.clone(), r];
    for (e, x) in el.iter().zip(&law.generator) {
        terms.push(-(e * l.generator_at(x, l.order as i64)));
    }
    Ok(Expr::add_all(terms))
}

fn join(g: &[Expr]) -> String {
    g.iter().map(Expr::to_string).collect::<Vec<_>>().join(", ")
}
