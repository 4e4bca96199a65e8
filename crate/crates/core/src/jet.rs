use std::collections::BTreeSet;

use lagsym_expr::{diff, Expr, Symbol};

use crate::error::{CoreError, Result};

/// Names of the independent variable, the dependent variables `x_1..x_n`,
/// the problem order `m` and the constant parameters.
///
/// Jet symbols `x_i^(k)` are valid for `k <= 2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    t: Symbol,
    vars: Vec<String>,
    order: u32,
    params: Vec<Symbol>,
}

impl JetContext {
    pub fn new(t: &str, vars: &[&str], order: u32, params: &[&str]) -> Result<Self> {
        if vars.is_empty() {
            return Err(CoreError::NoDependentVariable);
        }
        if order == 0 {
            return Err(CoreError::OrderZero);
        }
        let mut seen = BTreeSet::new();
        for name in std::iter::once(&t).chain(vars).chain(params) {
            if !seen.insert(*name) {
                return Err(CoreError::InvalidContext(format!("name `{name}` declared twice")));
            }
            if name.is_empty() {
                return Err(CoreError::InvalidContext("empty name".into()));
            }
        }
        Ok(JetContext {
            t: Symbol::new(t),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order,
            params: params.iter().map(|p| Symbol::new(p)).collect(),
        })
    }

    pub fn t(&self) -> &Symbol {
        &self.t
    }

    pub fn t_expr(&self) -> Expr {
        Expr::sym(self.t.clone())
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn max_order(&self) -> u32 {
        2 * self.order
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    /// Same context with a higher order. Lowering is rejected.
    pub fn with_order(&self, order: u32) -> Result<Self> {
        if order < self.order {
            return Err(CoreError::OrderTooLow { requested: order, detected: self.order });
        }
        Ok(JetContext { order, ..self.clone() })
    }

    /// `x_i^(k)`.
    pub fn jet(&self, i: usize, k: u32) -> Symbol {
        Symbol::derivative(&self.vars[i], k)
    }

    pub fn jet_expr(&self, i: usize, k: u32) -> Expr {
        Expr::sym(self.jet(i, k))
    }

    /// `(i, k)` when `s` is `x_i^(k)`.
    pub fn classify(&self, s: &Symbol) -> Option<(usize, u32)> {
        if s.shift().is_some() {
            return None;
        }
        self.vars.iter().position(|v| v == s.name()).map(|i| (i, s.deriv_order()))
    }

    /// All jet symbols with `lo <= k <= hi`, grouped by variable.
    pub fn jet_symbols(&self, lo: u32, hi: u32) -> Vec<Symbol> {
        (0..self.n()).flat_map(|i| (lo..=hi).map(move |k| (i, k))).map(|(i, k)| self.jet(i, k)).collect()
    }

    /// Rejects symbols that are neither `t`, a jet symbol within order
    /// `max_order`, nor a declared parameter.
    pub fn check_symbols(&self, e: &Expr, max_order: u32) -> Result<()> {
        for s in e.free_symbols() {
            if s == self.t || self.params.contains(&s) {
                continue;
            }
            match self.classify(&s) {
                Some((_, k)) if k <= max_order => {}
                Some(_) => {
                    return Err(CoreError::InvalidContext(format!(
                        "`{s}` exceeds the allowed derivative order {max_order}"
                    )))
                }
                None => {
                    return Err(CoreError::InvalidContext(format!(
                        "undeclared symbol `{s}` (declare it as a variable or parameter)"
                    )))
                }
            }
        }
        Ok(())
    }

    /// `D_t e = de/dt + sum_i sum_k x_i^(k+1) de/dx_i^(k)`.
    pub fn total_derivative(&self, e: &Expr) -> Result<Expr> {
        let mut terms = vec![diff(e, &self.t)];
        for s in e.free_symbols() {
            if let Some((i, k)) = self.classify(&s) {
                if k >= self.max_order() {
                    return Err(CoreError::JetOverflow { symbol: s.to_text(), max: self.max_order() });
                }
                terms.push(self.jet_expr(i, k + 1) * diff(e, &s));
            }
        }
        Ok(Expr::add_all(terms))
    }

    /// `D_t^n e`, canonicalized after each application.
    pub fn total_derivative_n(&self, e: &Expr, n: u32) -> Result<Expr> {
        let mut out = e.clone();
        for _ in 0..n {
            out = self.total_derivative(&out)?;
        }
        Ok(out)
    }
}

/// Highest derivative order of any dependent variable of `ctx` in `e`.
pub fn detect_order(e: &Expr, ctx: &JetContext) -> Result<u32> {
    let orders: Vec<u32> = e
        .free_symbols()
        .iter()
        .filter_map(|s| ctx.classify(s).map(|(_, k)| k))
        .collect();
    match orders.iter().max() {
        None => Err(CoreError::NoDependentVariable),
        Some(0) => Err(CoreError::OrderZero),
        Some(&m) => Ok(m),
    }
}
