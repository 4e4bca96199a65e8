//! One function per subcommand. Each returns the rendered lines, the JSON
//! body and the exit code; `main` does the printing.

use std::collections::HashMap;

use lagsym_core::{
    conservation_law, discrete_euler_lagrange, discrete_noether, discrete_psi, discrete_solve_generators,
    discrete_verify, euler_lagrange, solve_generators, verify_numeric, verify_symbolic, ConservationLaw,
    CoreError, DiscreteConservationLaw, DiscreteLagrangian, Generator, JetContext, Lagrangian,
};
use lagsym_expr::{substitute, Expr, Symbol, ZeroVerdict};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::output::{expr_json, generator_json, Out};
use crate::problem::{GenInput, Problem};

pub struct Run {
    pub out: Out,
    pub seed: u64,
    pub problem: Problem,
    /// Generator from `--generator` / `--generators`.
    pub generator: Option<GenInput>,
    /// Law from `--law`, bypassing generator resolution.
    pub law: Option<Expr>,
    pub empty_ok: bool,
}

pub struct Report {
    pub lines: Vec<String>,
    pub body: Value,
    pub code: u8,
}

impl Report {
    fn ok(lines: Vec<String>, body: Value) -> Self {
        Report { lines, body, code: 0 }
    }
}

fn equations(out: &Out, vars: &[String], eqs: &[Expr]) -> Report {
    let lines = eqs.iter().map(|e| format!("{} = 0", out.expr(e))).collect();
    let body: Vec<Value> =
        vars.iter().zip(eqs).map(|(v, e)| json!({"variable": v, "lhs": expr_json(e)})).collect();
    Report::ok(lines, json!({"equations": body}))
}

pub fn el(run: &Run) -> Result<Report> {
    let l = run.problem.lagrangian()?;
    Ok(equations(&run.out, run.problem.variables(), &euler_lagrange(&l)?))
}

fn substitute_labels(run: &Run, g: &Generator) -> Result<Generator> {
    let labels = run.problem.label_values()?;
    Ok(g.map(|e| substitute(e, &labels)))
}

pub fn symmetries(run: &Run) -> Result<Report> {
    let l = run.problem.lagrangian()?;
    let vars = run.problem.variables();
    let fam = solve_generators(&l, &run.problem.ansatz()?, run.seed)?;
    let out = &run.out;
    let mut lines = vec![format!("dimension {}", fam.dimension())];
    let mut basis = Vec::new();
    for (g, c) in fam.basis.iter().zip(&fam.labels) {
        lines.push(format!("{c}: {}", out.tuple(Some(&g.t), &g.x, vars)));
        let mut b = generator_json(Some(&g.t), &g.x);
        b["label"] = json!(c);
        basis.push(b);
    }
    let combined = substitute_labels(run, &fam.combined(vars.len()))?;
    let mut family = json!({
        "dimension": fam.dimension(),
        "labels": fam.labels,
        "basis": basis,
        "combined": generator_json(Some(&combined.t), &combined.x),
    });
    let mut code = 0;
    if fam.dimension() == 0 {
        lines.push(fam.empty_message());
        family["message"] = json!(fam.empty_message());
        if !run.empty_ok {
            code = 4;
        }
    } else {
        lines.push(format!("general: {}", out.tuple(Some(&combined.t), &combined.x, vars)));
    }
    Ok(Report { lines, body: json!({"family": family}), code })
}

/// Explicit generator, else the problem file's, else the solved family's
/// general element; `--set` labels are substituted in all cases.
fn resolve_generator(run: &Run, l: &Lagrangian) -> Result<Generator> {
    let vars = run.problem.variables();
    let g = match run.generator.clone().or(run.problem.file_generator()?) {
        Some(input) => input.continuous(vars)?,
        None => solve_generators(l, &run.problem.ansatz()?, run.seed)?.combined(vars.len()),
    };
    substitute_labels(run, &g)
}

const NOT_INVARIANT: &str = "generator is not a variational symmetry; the law need not be conserved";

pub fn noether(run: &Run) -> Result<Report> {
    let l = run.problem.lagrangian()?;
    let g = resolve_generator(run, &l)?;
    let law = conservation_law(&l, &g, run.seed)?;
    let mut body = json!({
        "generator": generator_json(Some(&g.t), &g.x),
        "law": expr_json(&law.phi),
        "order": law.order,
        "invariant": law.invariant,
    });
    if !law.invariant {
        body["warning"] = json!(NOT_INVARIANT);
    }
    Ok(Report::ok(vec![format!("{} = const", run.out.expr(&law.phi))], body))
}

fn highest_order(e: &Expr) -> u32 {
    e.free_symbols().iter().map(Symbol::deriv_order).max().unwrap_or(0)
}

/// Symbols of `e` that are neither the time, a jet variable nor a parameter
/// (leftover family labels) set to 1.
fn close_labels(e: &Expr, keep: impl Fn(&Symbol) -> bool) -> Expr {
    let map: HashMap<Symbol, Expr> =
        e.free_symbols().into_iter().filter(|s| !keep(s)).map(|s| (s, Expr::one())).collect();
    if !map.is_empty() {
        let names: Vec<&str> = map.keys().map(Symbol::name).collect();
        log::warn!("setting unassigned labels {} to 1 for numeric checking", names.join(", "));
    }
    substitute(e, &map)
}

/// `l` with the law's free labels declared as parameters, so the symbolic
/// check treats them as arbitrary constants.
fn with_labels(l: &Lagrangian, phi: &Expr) -> Result<Lagrangian> {
    let ctx = &l.ctx;
    let extra: Vec<Symbol> = phi
        .free_symbols()
        .into_iter()
        .filter(|s| s != ctx.t() && ctx.classify(s).is_none() && !ctx.params().contains(s))
        .collect();
    if extra.is_empty() {
        return Ok(l.clone());
    }
    let vars: Vec<&str> = ctx.vars().iter().map(String::as_str).collect();
    let params: Vec<&str> = ctx.params().iter().chain(&extra).map(Symbol::name).collect();
    let wider = JetContext::new(ctx.t().name(), &vars, ctx.order(), &params)?;
    Ok(Lagrangian::new(l.expr.clone(), wider)?)
}

fn verdict_name(v: ZeroVerdict) -> &'static str {
    match v {
        ZeroVerdict::Zero => "zero",
        ZeroVerdict::ProbablyZero => "probably zero",
        ZeroVerdict::NonZero => "nonzero",
    }
}

/// Symbolic reduction first; the numeric integration runs when initial data
/// is given or the symbolic route is unavailable.
pub fn verify(run: &Run, numeric_requested: bool) -> Result<Report> {
    let l = run.problem.lagrangian()?;
    let out = &run.out;
    let law = match &run.law {
        Some(phi) => {
            let phi = substitute(phi, &run.problem.label_values()?);
            ConservationLaw { order: highest_order(&phi), phi, generator: Generator::zero(l.ctx.n()), invariant: true }
        }
        None => conservation_law(&l, &resolve_generator(run, &l)?, run.seed)?,
    };
    let mut lines = vec![format!("law: {} = const", out.expr(&law.phi))];
    let mut body = json!({"law": expr_json(&law.phi), "invariant": law.invariant});
    let mut passed = true;
    let mut modes = Vec::new();

    let symbolic = with_labels(&l, &law.phi).and_then(|lx| Ok(verify_symbolic(&lx, &law, run.seed)?));
    let fallback = match symbolic {
        Ok(check) => {
            modes.push("symbolic");
            let ok = check.verdict.is_zero();
            passed &= ok;
            lines.push(format!("symbolic: residual {} ({})", out.expr(&check.residual), verdict_name(check.verdict)));
            body["symbolic"] = json!({
                "residual": expr_json(&check.residual),
                "verdict": verdict_name(check.verdict),
                "passed": ok,
            });
            None
        }
        Err(CliError::Core(e)) if !matches!(e, CoreError::Expr(_) | CoreError::JetOverflow { .. }) => {
            lines.push(format!("symbolic: unavailable ({e})"));
            body["symbolic"] = Value::Null;
            Some(e)
        }
        Err(e) => return Err(e),
    };

    if numeric_requested || run.problem.has_numeric() || fallback.is_some() {
        let setup = run.problem.numeric_setup(&l, run.seed)?;
        let ctx = &l.ctx;
        let phi = close_labels(&law.phi, |s| s == ctx.t() || ctx.classify(s).is_some() || ctx.params().contains(s));
        let numeric_law = ConservationLaw { phi, ..law.clone() };
        let rep = match verify_numeric(&l, &numeric_law, &setup) {
            Ok(r) => r,
            Err(e) => return Err(fallback.unwrap_or(e).into()),
        };
        modes.push("numeric");
        passed &= rep.passed;
        lines.push(format!(
            "numeric: drift {} over t in [{}, {}] with {} samples, tolerance {} ({})",
            out.float(rep.drift),
            setup.t0,
            setup.t0 + setup.horizon,
            rep.samples,
            out.float(setup.tol),
            if rep.passed { "pass" } else { "fail" }
        ));
        body["numeric"] = json!({
            "t0": setup.t0,
            "horizon": setup.horizon,
            "state": setup.state,
            "drift": rep.drift,
            "phi0": rep.phi0,
            "samples": rep.samples,
            "tol": setup.tol,
            "passed": rep.passed,
        });
    } else {
        body["numeric"] = Value::Null;
    }
    if !law.invariant {
        body["warning"] = json!(NOT_INVARIANT);
    }
    body["mode"] = json!(modes.join("+"));
    body["passed"] = json!(passed);
    lines.push(if passed { "PASS" } else { "FAIL" }.to_string());
    Ok(Report { lines, body, code: if passed { 0 } else { 5 } })
}

pub fn discrete_el(run: &Run) -> Result<Report> {
    let l = run.problem.discrete()?;
    Ok(equations(&run.out, run.problem.variables(), &discrete_euler_lagrange(&l)))
}

fn substitute_discrete(run: &Run, g: &[Expr]) -> Result<Vec<Expr>> {
    let labels = run.problem.label_values()?;
    Ok(g.iter().map(|e| substitute(e, &labels)).collect())
}

pub fn discrete_symmetries(run: &Run) -> Result<Report> {
    let l = run.problem.discrete()?;
    let vars = run.problem.variables();
    let fam = discrete_solve_generators(&l, &run.problem.ansatz()?, run.seed)?;
    let out = &run.out;
    let mut lines = vec![format!("dimension {}", fam.dimension())];
    if fam.degenerate {
        lines.push("degenerate: the Lagrangian does not depend on the sequence, every generator is admissible".into());
    }
    let mut basis = Vec::new();
    for (g, c) in fam.basis.iter().zip(&fam.labels) {
        lines.push(format!("{c}: {}", out.tuple(None, g, vars)));
        let mut b = generator_json(None, g);
        b["label"] = json!(c);
        basis.push(b);
    }
    let combined = substitute_discrete(run, &fam.combined(vars.len()))?;
    let mut family = json!({
        "dimension": fam.dimension(),
        "labels": fam.labels,
        "basis": basis,
        "combined": generator_json(None, &combined),
        "degenerate": fam.degenerate,
    });
    let mut code = 0;
    if fam.dimension() == 0 {
        let msg = format!(
            "no nonzero invariance generator within the polynomial ansatz of degree {}",
            fam.ansatz.degree
        );
        lines.push(msg.clone());
        family["message"] = json!(msg);
        if !run.empty_ok {
            code = 4;
        }
    } else {
        lines.push(format!("general: {}", out.tuple(None, &combined, vars)));
    }
    Ok(Report { lines, body: json!({"family": family}), code })
}

fn resolve_discrete_generator(run: &Run, l: &DiscreteLagrangian) -> Result<Vec<Expr>> {
    let vars = run.problem.variables();
    let g = match run.generator.clone().or(run.problem.file_generator()?) {
        Some(input) => input.discrete(vars)?,
        None => discrete_solve_generators(l, &run.problem.ansatz()?, run.seed)?.combined(vars.len()),
    };
    substitute_discrete(run, &g)
}

/// `l` with the generator's free labels declared as parameters.
fn with_discrete_labels(l: &DiscreteLagrangian, g: &[Expr]) -> DiscreteLagrangian {
    let vars = &l.vars;
    let mut wider = l.clone();
    for e in g {
        for s in e.free_symbols() {
            if s != l.k && s.shift().is_none() && !vars.iter().any(|v| v == s.name()) && !wider.params.contains(&s) {
                wider.params.push(s);
            }
        }
    }
    wider
}

pub fn discrete_noether_cmd(run: &Run) -> Result<Report> {
    let l = run.problem.discrete()?;
    let g = resolve_discrete_generator(run, &l)?;
    let law = discrete_noether(&with_discrete_labels(&l, &g), &g, run.seed)?;
    let mut body = json!({
        "generator": generator_json(None, &g),
        "law": expr_json(&law.phi),
        "invariant": law.invariant,
    });
    if !law.invariant {
        body["warning"] = json!("generator does not leave the Lagrangian invariant; the law need not be conserved");
    }
    Ok(Report::ok(vec![format!("{} = const", run.out.expr(&law.phi))], body))
}

pub fn discrete_verify_cmd(run: &Run) -> Result<Report> {
    let l = run.problem.discrete()?;
    let out = &run.out;
    let law = match &run.law {
        Some(phi) => {
            let raw = substitute(phi, &run.problem.label_values()?);
            // bare variable names mean x[k], as in the Lagrangian
            let phi = l.generator_at(&raw, 0);
            DiscreteConservationLaw { phi, generator: vec![Expr::zero(); l.n()], psi: discrete_psi(&l), invariant: true }
        }
        None => {
            let g = resolve_discrete_generator(run, &l)?;
            let g: Vec<Expr> = g
                .iter()
                .map(|e| close_labels(e, |s| *s == l.k || l.params.contains(s) || l.vars.iter().any(|v| v == s.name())))
                .collect();
            discrete_noether(&l, &g, run.seed)?
        }
    };
    let phi = close_labels(&law.phi, |s| s.shift().is_some() || *s == l.k || l.params.contains(s));
    let checked = DiscreteConservationLaw { phi, ..law.clone() };
    let setup = run.problem.discrete_setup(run.seed)?;
    let rep = discrete_verify(&l, &checked, &setup)?;
    let tol = run.problem.discrete_tol();
    let passed = rep.deviation <= tol;
    let arithmetic = if rep.exact { "exact rational" } else { "floating point" };
    let lines = vec![
        format!("law: {} = const", out.expr(&law.phi)),
        format!(
            "deviation {} over {} steps, {} trials, {arithmetic} arithmetic, tolerance {}",
            out.float(rep.deviation),
            setup.steps,
            setup.trials,
            out.float(tol)
        ),
        if passed { "PASS" } else { "FAIL" }.to_string(),
    ];
    let body = json!({
        "law": expr_json(&law.phi),
        "invariant": law.invariant,
        "deviation": rep.deviation,
        "exact": rep.exact,
        "steps": setup.steps,
        "trials": setup.trials,
        "tol": tol,
        "passed": passed,
    });
    Ok(Report { lines, body, code: if passed { 0 } else { 5 } })
}
