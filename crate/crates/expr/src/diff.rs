use crate::expr::{Expr, Func, Node};
use crate::symbol::Symbol;

/// Partial derivative with respect to `s`, treating every other symbol as independent.
pub fn diff(e: &Expr, s: &Symbol) -> Expr {
    if !e.contains_symbol(s) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(x) => {
            if x == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::add_all(ts.iter().map(|t| diff(t, s))),
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let d = diff(f, s);
                if d.is_zero() {
                    continue;
                }
                let rest = fs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone());
                terms.push(Expr::mul_all(std::iter::once(d).chain(rest)));
            }
            Expr::add_all(terms)
        }
        Node::Pow(b, x) => {
            let db = diff(b, s);
            let dx = diff(x, s);
            let mut terms = Vec::new();
            if !db.is_zero() {
                terms.push(Expr::mul_all([x.clone(), b.pow(&(x - Expr::one())), db]));
            }
            if !dx.is_zero() {
                terms.push(Expr::mul_all([e.clone(), b.ln(), dx]));
            }
            Expr::add_all(terms)
        }
        Node::Func(f, a) => {
            let da = diff(a, s);
            let outer = match f {
                Func::Ln => a.recip(),
                Func::Exp => e.clone(),
                Func::Sin => a.cos(),
                Func::Cos => -a.sin(),
            };
            outer * da
        }
    }
}
