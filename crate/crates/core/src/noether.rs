//! Noether conservation laws and their verification.

use std::cell::Cell;
use std::collections::HashMap;

use lagsym_expr::{diff, substitute, zero_test, Expr, F64Fn, Symbol, ZeroVerdict};
use nalgebra::{DMatrix, DVector};
use ode_solvers::{Dopri5, System};

use crate::error::{CoreError, Result};
use crate::linalg;
use crate::symmetry::{certify, determining_residual, p_sequence, Generator};
use crate::variational::{euler_lagrange, Lagrangian};

/// A first integral `phi` together with the generator it came from.
#[derive(Clone, Debug)]
pub struct ConservationLaw {
    pub phi: Expr,
    /// Highest derivative order occurring in `phi`.
    pub order: u32,
    pub generator: Generator,
    /// False when the generator failed the invariance test.
    pub invariant: bool,
}

/// `Psi^i` for `i = 1..m`, as `psi[i - 1][var]`.
pub fn psi_sequence(l: &Lagrangian) -> Result<Vec<Vec<Expr>>> {
    let ctx = &l.ctx;
    let m = ctx.order();
    let mut out = vec![Vec::new(); m as usize];
    out[m as usize - 1] = (0..ctx.n()).map(|v| l.partial(v, m)).collect();
    for i in (1..m).rev() {
        let next = &out[i as usize];
        let cur = (0..ctx.n())
            .map(|v| Ok(l.partial(v, i) - ctx.total_derivative(&next[v])?))
            .collect::<Result<Vec<_>>>()?;
        out[i as usize - 1] = cur;
    }
    Ok(out)
}

fn highest_order(l: &Lagrangian, e: &Expr) -> u32 {
    e.free_symbols().iter().filter_map(|s| l.ctx.classify(s)).map(|(_, k)| k).max().unwrap_or(0)
}

/// `sum_i Psi^i p^(i-1) + (L - sum_i Psi^i x^(i)) T`.
///
/// A generator that fails the invariance test still yields a law, marked
/// non-invariant.
pub fn conservation_law(l: &Lagrangian, g: &Generator, seed: u64) -> Result<ConservationLaw> {
    let ctx = &l.ctx;
    let psi = psi_sequence(l)?;
    let p = p_sequence(ctx, g)?;
    let mut flux = Vec::new();
    let mut hamiltonian = vec![l.expr.clone()];
    for (i, row) in psi.iter().enumerate() {
        for (v, ps) in row.iter().enumerate() {
            flux.push(ps * &p[v][i]);
            hamiltonian.push(-(ps * ctx.jet_expr(v, i as u32 + 1)));
        }
    }
    flux.push(Expr::add_all(hamiltonian) * &g.t);
    let phi = Expr::add_all(flux);

    let invariant = certify(&determining_residual(l, g)?, seed).is_ok();
    if !invariant {
        let x: Vec<String> = g.x.iter().map(Expr::to_string).collect();
        log::warn!("generator T = {}, X = ({}) is not a variational symmetry", g.t, x.join(", "));
    }
    Ok(ConservationLaw { order: highest_order(l, &phi), phi, generator: g.clone(), invariant })
}

/// The Euler-Lagrange system as `H * top + R = 0`, where the top symbol of
/// variable `v` is `x_v^(2 m_v)` and `m_v` is its highest order in `L`.
struct TopLinear {
    h: Vec<Vec<Expr>>,
    r: Vec<Expr>,
    tops: Vec<Symbol>,
    orders: Vec<u32>,
}

fn top_linear(l: &Lagrangian) -> Result<TopLinear> {
    let ctx = &l.ctx;
    let el = euler_lagrange(l)?;
    let orders: Vec<u32> = (0..ctx.n()).map(|v| 2 * l.var_order(v)).collect();
    if orders.contains(&0) {
        return Err(CoreError::DegenerateHessian);
    }
    let tops: Vec<Symbol> = orders.iter().enumerate().map(|(v, &k)| ctx.jet(v, k)).collect();
    let zero: HashMap<Symbol, Expr> = tops.iter().map(|s| (s.clone(), Expr::zero())).collect();
    let mut h = Vec::new();
    for e in &el {
        let row: Vec<Expr> = tops.iter().map(|s| diff(e, s)).collect();
        if row.iter().any(|c| c.any_symbol(&|s| tops.contains(s))) {
            return Err(CoreError::NonlinearTop(e.to_string()));
        }
        h.push(row);
    }
    let r = el.iter().map(|e| substitute(e, &zero)).collect();
    Ok(TopLinear { h, r, tops, orders })
}

/// Replacements for every `x_v^(k)` with `2 m_v <= k <= 2m`, each free of
/// such symbols.
fn reduction_map(l: &Lagrangian, sys: &TopLinear, seed: u64) -> Result<HashMap<Symbol, Expr>> {
    let ctx = &l.ctx;
    let minus_r: Vec<Expr> = sys.r.iter().map(|e| -e).collect();
    let z = linalg::solve(&sys.h, &minus_r, seed).ok_or(CoreError::DegenerateHessian)?;
    let mut map: HashMap<Symbol, Expr> = sys.tops.iter().cloned().zip(z).collect();
    for v in 0..ctx.n() {
        let mut cur = map[&sys.tops[v]].clone();
        for k in sys.orders[v] + 1..=ctx.max_order() {
            let base: HashMap<Symbol, Expr> = sys.tops.iter().map(|s| (s.clone(), map[s].clone())).collect();
            cur = substitute(&ctx.total_derivative(&cur)?, &base);
            map.insert(ctx.jet(v, k), cur.clone());
        }
    }
    Ok(map)
}

/// Outcome of the symbolic check.
#[derive(Clone, Debug)]
pub struct SymbolicCheck {
    /// `D_t phi` with the top derivatives eliminated through the EL system.
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

/// Reduces `D_t phi` modulo the Euler-Lagrange system.
pub fn verify_symbolic(l: &Lagrangian, law: &ConservationLaw, seed: u64) -> Result<SymbolicCheck> {
    let ctx = &l.ctx;
    ctx.check_symbols(&law.phi, ctx.max_order() - 1)?;
    let sys = top_linear(l)?;
    let map = reduction_map(l, &sys, seed)?;
    // phi may carry derivatives at or above a variable's top order
    let phi = substitute(&law.phi, &map);
    let residual = substitute(&ctx.total_derivative(&phi)?, &map);
    let verdict = zero_test(&residual, seed);
    Ok(SymbolicCheck { residual, verdict })
}

/// Initial data and tolerances for [`verify_numeric`].
#[derive(Clone, Debug)]
pub struct NumericSetup {
    pub t0: f64,
    pub horizon: f64,
    /// Variable-major initial data, see [`verify_numeric`].
    pub state: Vec<f64>,
    pub params: HashMap<String, f64>,
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
    pub tol: f64,
}

impl NumericSetup {
    pub fn new(t0: f64, horizon: f64, state: Vec<f64>) -> Self {
        NumericSetup {
            t0,
            horizon,
            state,
            params: HashMap::new(),
            rtol: 1e-10,
            atol: 1e-12,
            samples: 200,
            tol: 1e-6,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }
}

#[derive(Clone, Debug)]
pub struct NumericReport {
    /// `max |phi(t) - phi(t0)| / max(1, |phi(t0)|)`.
    pub drift: f64,
    pub phi0: f64,
    pub samples: usize,
    pub passed: bool,
}

struct FirstOrder<'a> {
    /// Start of each variable's block in the state vector.
    offsets: Vec<usize>,
    orders: Vec<usize>,
    h: Vec<F64Fn>,
    r: Vec<F64Fn>,
    params: &'a [f64],
    /// The solver runs in `s = t - t0`: its dense output misbehaves when
    /// the interval straddles zero.
    t0: f64,
    failed: Cell<bool>,
}

impl FirstOrder<'_> {
    fn args(&self, s: f64, y: &DVector<f64>) -> Vec<f64> {
        std::iter::once(self.t0 + s).chain(y.iter().copied()).chain(self.params.iter().copied()).collect()
    }
}

impl System<f64, DVector<f64>> for FirstOrder<'_> {
    fn system(&self, t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let args = self.args(t, y);
        let n = self.orders.len();
        let h = DMatrix::from_fn(n, n, |i, j| self.h[i * n + j].eval(&args));
        let r = DVector::from_fn(n, |i, _| -self.r[i].eval(&args));
        let top = h.lu().solve(&r);
        for v in 0..n {
            let base = self.offsets[v];
            let len = self.orders[v];
            for k in 0..len - 1 {
                dy[base + k] = y[base + k + 1];
            }
            dy[base + len - 1] = top.as_ref().map_or(f64::NAN, |z| z[v]);
        }
        if dy.iter().any(|d| !d.is_finite()) {
            self.failed.set(true);
            dy.fill(0.0);
        }
    }

    fn solout(&mut self, _t: f64, _y: &DVector<f64>, _dy: &DVector<f64>) -> bool {
        self.failed.get()
    }
}

/// Integrates the Euler-Lagrange system from the given data and measures how
/// far `phi` moves from its initial value.
///
/// The state holds `x_v, ..., x_v^(2 m_v - 1)` for each variable in turn,
/// where `m_v` is the highest order of `x_v` in `L`.
pub fn verify_numeric(l: &Lagrangian, law: &ConservationLaw, setup: &NumericSetup) -> Result<NumericReport> {
    let ctx = &l.ctx;
    ctx.check_symbols(&law.phi, ctx.max_order() - 1)?;
    let sys = top_linear(l)?;
    let orders: Vec<usize> = sys.orders.iter().map(|&k| k as usize).collect();
    let dim: usize = orders.iter().sum();
    if setup.state.len() != dim {
        return Err(CoreError::InitialData(format!("expected {dim} state values, got {}", setup.state.len())));
    }
    if !(setup.horizon > 0.0 && setup.horizon.is_finite() && setup.t0.is_finite()) {
        return Err(CoreError::InitialData(format!("need finite t0 and horizon > 0, got {} and {}", setup.t0, setup.horizon)));
    }

    let mut vars = vec![ctx.t().clone()];
    let mut offsets = Vec::new();
    for (v, &len) in orders.iter().enumerate() {
        offsets.push(vars.len() - 1);
        vars.extend((0..len as u32).map(|k| ctx.jet(v, k)));
    }
    let mut params = Vec::new();
    for p in ctx.params() {
        let value = setup
            .params
            .get(p.name())
            .ok_or_else(|| CoreError::InitialData(format!("missing value for parameter {}", p.name())))?;
        vars.push(p.clone());
        params.push(*value);
    }
    let mut phi_expr = law.phi.clone();
    if phi_expr.any_symbol(&|s| ctx.classify(s).is_some_and(|(v, k)| k >= sys.orders[v])) {
        phi_expr = substitute(&phi_expr, &reduction_map(l, &sys, 0)?);
    }
    let h = sys.h.iter().flatten().map(|e| F64Fn::compile(e, &vars)).collect::<std::result::Result<_, _>>()?;
    let r = sys.r.iter().map(|e| F64Fn::compile(e, &vars)).collect::<std::result::Result<_, _>>()?;
    let phi = F64Fn::compile(&phi_expr, &vars)?;

    let system = FirstOrder { offsets, orders, h, r, params: &params, t0: setup.t0, failed: Cell::new(false) };
    let y0 = DVector::from_vec(setup.state.clone());
    let mut probe = DVector::zeros(dim);
    system.system(0.0, &y0, &mut probe);
    let phi0 = phi.eval(&system.args(0.0, &y0));
    if system.failed.get() || !phi0.is_finite() {
        return Err(CoreError::InitialData("equations or law undefined at the initial point".into()));
    }

    let samples = setup.samples.max(100);
    let dx = setup.horizon / samples as f64;
    let mut solver = Dopri5::new(system, 0.0, setup.horizon, dx, y0, setup.rtol, setup.atol);
    solver.integrate().map_err(|e| CoreError::Integration(e.to_string()))?;
    let (ts, ys) = (solver.x_out(), solver.y_out());
    let mut drift: f64 = 0.0;
    for (t, y) in ts.iter().zip(ys) {
        let args: Vec<f64> = std::iter::once(setup.t0 + *t).chain(y.iter().copied()).chain(params.iter().copied()).collect();
        let v = phi.eval(&args);
        if !v.is_finite() {
            return Err(CoreError::Integration(format!("law undefined at t = {}", setup.t0 + t)));
        }
        drift = drift.max((v - phi0).abs());
    }
    let reached = ts.last().copied().unwrap_or(0.0);
    if (reached - setup.horizon).abs() > 1e-9 * setup.horizon.max(1.0) {
        return Err(CoreError::Integration(format!("integration stopped at t = {}", setup.t0 + reached)));
    }
    let drift = drift / phi0.abs().max(1.0);
    Ok(NumericReport { drift, phi0, samples: ts.len(), passed: drift <= setup.tol })
}
