use lagsym_expr::{diff, parse, Expr};

use crate::error::{CoreError, Result};
use crate::jet::{detect_order, JetContext};

/// A Lagrangian `L(t, x, x', ..., x^(m))` with its jet context.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    pub expr: Expr,
    pub ctx: JetContext,
}

impl Lagrangian {
    /// Validates that `expr` only mentions `t`, declared parameters and jet
    /// symbols of order at most `m`.
    pub fn new(expr: Expr, ctx: JetContext) -> Result<Self> {
        ctx.check_symbols(&expr, ctx.order())?;
        Ok(Lagrangian { expr, ctx })
    }

    /// Parses `src`, detecting the order unless `order` raises it.
    pub fn parse(src: &str, t: &str, vars: &[&str], params: &[&str], order: Option<u32>) -> Result<Self> {
        let expr = parse(src)?;
        let probe = JetContext::new(t, vars, 1, params)?;
        let detected = match detect_order(&expr, &probe) {
            Err(CoreError::OrderZero | CoreError::NoDependentVariable) if order.is_some() => 0,
            d => d?,
        };
        let m = match order {
            Some(m) if m < detected => {
                return Err(CoreError::OrderTooLow { requested: m, detected })
            }
            Some(m) => m,
            None => detected,
        };
        Lagrangian::new(expr, probe.with_order(m)?)
    }

    /// Highest derivative of variable `i` occurring in `L`.
    pub fn var_order(&self, i: usize) -> u32 {
        self.expr
            .free_symbols()
            .iter()
            .filter_map(|s| self.ctx.classify(s))
            .filter(|&(v, _)| v == i)
            .map(|(_, k)| k)
            .max()
            .unwrap_or(0)
    }

    /// `dL/dx_i^(k)`.
    pub fn partial(&self, i: usize, k: u32) -> Expr {
        diff(&self.expr, &self.ctx.jet(i, k))
    }
}

/// `EL_i = dL/dx_i + sum_{k=1..m} (-1)^k D_t^k (dL/dx_i^(k))`, one entry per variable.
pub fn euler_lagrange(l: &Lagrangian) -> Result<Vec<Expr>> {
    let ctx = &l.ctx;
    (0..ctx.n())
        .map(|i| {
            let mut terms = vec![l.partial(i, 0)];
            for k in 1..=ctx.order() {
                let d = ctx.total_derivative_n(&l.partial(i, k), k)?;
                terms.push(if k % 2 == 1 { -d } else { d });
            }
            Ok(Expr::add_all(terms))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle() {
        let l = Lagrangian::parse("x'^2", "t", &["x"], &[], None).unwrap();
        assert_eq!(euler_lagrange(&l).unwrap(), vec![parse("-2*x''").unwrap()]);
    }

    #[test]
    fn order_override_only_upward() {
        assert!(Lagrangian::parse("x'^2", "t", &["x"], &[], Some(2)).is_ok());
        assert!(matches!(
            Lagrangian::parse("x''^2", "t", &["x"], &[], Some(1)),
            Err(CoreError::OrderTooLow { .. })
        ));
        assert!(Lagrangian::parse("x'^2*K", "t", &["x"], &[], None).is_err());
    }
}
