use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::symbol::Symbol;

/// Elementary functions of one argument.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Func {
    Ln,
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "ln" => Some(Func::Ln),
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

/// One node of an expression tree.
///
/// Values built through the constructors on [`Expr`] are always in canonical
/// form; `Node` is exposed for read-only pattern matching.
#[derive(PartialEq, Eq, Hash)]
pub enum Node {
    Num(BigRational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Func(Func, Expr),
}

/// Immutable, cheaply clonable symbolic expression.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    pub fn is_num(&self) -> bool {
        matches!(self.node(), Node::Num(_))
    }

    /// Operands of a sum; a non-sum is its own single term.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(ts) => ts.clone(),
            _ if self.is_zero() => vec![],
            _ => vec![self.clone()],
        }
    }

    /// Operands of a product; a non-product is its own single factor.
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Splits a canonical term into its rational coefficient and the rest.
    pub fn split_coeff(&self) -> (BigRational, Expr) {
        match self.node() {
            Node::Num(r) => (r.clone(), Expr::one()),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(r) => {
                    let rest = if fs.len() == 2 {
                        fs[1].clone()
                    } else {
                        Expr::from_node(Node::Mul(fs[1..].to_vec()))
                    };
                    (r.clone(), rest)
                }
                _ => (BigRational::one(), self.clone()),
            },
            _ => (BigRational::one(), self.clone()),
        }
    }

    /// True when the leading coefficient is negative.
    pub fn is_negative_term(&self) -> bool {
        self.split_coeff().0.is_negative()
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Node::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Node::Func(_, a) => a.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.any_symbol(&|x| x == s)
    }

    pub fn any_symbol(&self, pred: &dyn Fn(&Symbol) -> bool) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(s) => pred(s),
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(|x| x.any_symbol(pred)),
            Node::Pow(b, e) => b.any_symbol(pred) || e.any_symbol(pred),
            Node::Func(_, a) => a.any_symbol(pred),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => 1,
            Node::Add(xs) | Node::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, e) => 1 + b.size() + e.size(),
            Node::Func(_, a) => 1 + a.size(),
        }
    }

    /// A Laurent polynomial over the rationals: only numbers, symbols and
    /// integer powers of symbols. Structural zero testing is exact for these.
    pub fn is_laurent_polynomial(&self) -> bool {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => true,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().all(Expr::is_laurent_polynomial),
            Node::Pow(b, e) => {
                matches!(b.node(), Node::Sym(_))
                    && matches!(e.node(), Node::Num(r) if r.is_integer())
            }
            Node::Func(..) => false,
        }
    }
}

pub(crate) fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

// ----- canonical ordering -----

fn rank(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(_) => 0,
        Node::Sym(_) | Node::Pow(..) | Node::Func(..) => 1,
        Node::Mul(_) => 2,
        Node::Add(_) => 3,
    }
}

fn base_rank(e: &Expr) -> u8 {
    match e.node() {
        Node::Sym(_) => 0,
        Node::Func(..) => 1,
        Node::Add(_) => 2,
        Node::Mul(_) => 3,
        Node::Num(_) => 4,
        Node::Pow(..) => 5,
    }
}

fn cmp_base(a: &Expr, b: &Expr) -> Ordering {
    base_rank(a).cmp(&base_rank(b)).then_with(|| match (a.node(), b.node()) {
        (Node::Sym(x), Node::Sym(y)) => x.cmp(y),
        (Node::Func(f, x), Node::Func(g, y)) => f.cmp(g).then_with(|| x.cmp(y)),
        (Node::Num(x), Node::Num(y)) => x.cmp(y),
        _ => cmp_expr(a, b),
    })
}

fn cmp_list(a: &[Expr], b: &[Expr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.cmp(y);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

fn cmp_expr(a: &Expr, b: &Expr) -> Ordering {
    if Arc::ptr_eq(&a.0, &b.0) {
        return Ordering::Equal;
    }
    rank(a).cmp(&rank(b)).then_with(|| match (a.node(), b.node()) {
        (Node::Num(x), Node::Num(y)) => x.cmp(y),
        (Node::Mul(x), Node::Mul(y)) | (Node::Add(x), Node::Add(y)) => cmp_list(x, y),
        _ => {
            // power-like: compare bases, then exponents (an atom has exponent 1)
            let (ba, ea) = pow_parts(a);
            let (bb, eb) = pow_parts(b);
            cmp_base(ba, bb).then_with(|| match (ea, eb) {
                (None, None) => Ordering::Equal,
                (None, Some(e)) => cmp_expr(&Expr::one(), e),
                (Some(e), None) => cmp_expr(e, &Expr::one()),
                (Some(x), Some(y)) => cmp_expr(x, y),
            })
        }
    })
}

fn pow_parts(e: &Expr) -> (&Expr, Option<&Expr>) {
    match e.node() {
        Node::Pow(b, x) => (b, Some(x)),
        _ => (e, None),
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_expr(self, other)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::to_text(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", crate::render::to_text(self))
    }
}
