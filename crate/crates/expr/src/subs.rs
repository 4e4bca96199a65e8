use std::collections::HashMap;

use crate::expr::{Expr, Node};
use crate::symbol::Symbol;

/// Replaces symbols by expressions simultaneously, then re-canonicalizes.
pub fn substitute(e: &Expr, map: &HashMap<Symbol, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    map_symbols(e, &|s| map.get(s).cloned())
}

/// Rebuilds `e`, replacing each symbol for which `f` returns a value.
pub fn map_symbols(e: &Expr, f: &dyn Fn(&Symbol) -> Option<Expr>) -> Expr {
    match e.node() {
        Node::Num(_) => e.clone(),
        Node::Sym(s) => f(s).unwrap_or_else(|| e.clone()),
        Node::Add(ts) => Expr::add_all(ts.iter().map(|t| map_symbols(t, f))),
        Node::Mul(fs) => Expr::mul_all(fs.iter().map(|t| map_symbols(t, f))),
        Node::Pow(b, x) => map_symbols(b, f).pow(&map_symbols(x, f)),
        Node::Func(g, a) => Expr::apply(*g, map_symbols(a, f)),
    }
}
