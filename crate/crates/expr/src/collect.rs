//! Coefficient extraction with respect to a set of symbols.

use std::collections::{BTreeMap, HashSet};

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{ExprError, Result};
use crate::expr::{Expr, Node};
use crate::symbol::Symbol;

/// A product of powers of symbol-dependent bases, keyed by base.
pub type Monomial = BTreeMap<Expr, BigRational>;

pub fn monomial_expr(m: &Monomial) -> Expr {
    Expr::mul_all(m.iter().map(|(b, r)| b.pow(&Expr::num(r.clone()))))
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (k, r) in b {
        let e = out.entry(k.clone()).or_insert_with(BigRational::zero);
        *e += r;
        if e.is_zero() {
            out.remove(k);
        }
    }
    out
}

/// Coefficients of `e` as a polynomial in `vars`.
///
/// Fails when some member of `vars` occurs other than as a non-negative
/// integer power, naming the offending factor.
pub fn collect(e: &Expr, vars: &[Symbol]) -> Result<BTreeMap<Monomial, Expr>> {
    let set: HashSet<&Symbol> = vars.iter().collect();
    let depends = |x: &Expr| x.any_symbol(&|s| set.contains(s));
    let mut acc: BTreeMap<Monomial, Vec<Expr>> = BTreeMap::new();
    for t in e.terms() {
        let mut coef = Vec::new();
        let mut mono = Monomial::new();
        for f in t.factors() {
            if !depends(&f) {
                coef.push(f);
                continue;
            }
            let (b, r) = match f.node() {
                Node::Sym(_) => (f.clone(), BigRational::from_integer(1.into())),
                Node::Pow(b, x) => match (b.node(), x.as_num()) {
                    (Node::Sym(_), Some(r)) if r.is_integer() && *r > BigRational::zero() => (b.clone(), r.clone()),
                    _ => return Err(ExprError::NonPolynomial(f.to_string())),
                },
                _ => return Err(ExprError::NonPolynomial(f.to_string())),
            };
            *mono.entry(b).or_insert_with(BigRational::zero) += r;
        }
        acc.entry(mono).or_default().push(Expr::mul_all(coef));
    }
    Ok(acc
        .into_iter()
        .filter_map(|(m, cs)| {
            let c = Expr::add_all(cs);
            (!c.is_zero()).then_some((m, c))
        })
        .collect())
}

/// Writes `w * e` as a sum of coefficient-monomial pairs, where coefficients
/// are free of `vars` and `w` is a product of positive integer powers of the
/// symbol-dependent sums appearing with negative exponents in `e`.
///
/// Distinct keys are distinct functions of `vars`, so `e == 0` identically
/// whenever every coefficient vanishes; clearing the sum denominators first
/// makes the converse hold for algebraic radicals like `(q1^2+q2^2)^(-3/2)`.
pub fn collect_independent(e: &Expr, vars: &[Symbol]) -> BTreeMap<Monomial, Expr> {
    let set: HashSet<&Symbol> = vars.iter().collect();
    let depends = |x: &Expr| x.any_symbol(&|s| set.contains(s));

    let mut pairs: Vec<(Vec<Expr>, Monomial)> = Vec::new();
    for t in e.terms() {
        let mut coef = Vec::new();
        let mut mono = Monomial::new();
        for f in t.factors() {
            if !depends(&f) {
                coef.push(f);
                continue;
            }
            let (b, r) = match f.node() {
                Node::Pow(b, x) => match x.as_num() {
                    Some(r) => (b.clone(), r.clone()),
                    None => (f.clone(), BigRational::from_integer(1.into())),
                },
                _ => (f.clone(), BigRational::from_integer(1.into())),
            };
            *mono.entry(b).or_insert_with(BigRational::zero) += r;
        }
        pairs.push((coef, mono));
    }

    // shift per sum base so every exponent becomes non-negative
    let mut shift: BTreeMap<Expr, BigRational> = BTreeMap::new();
    for (_, mono) in &pairs {
        for (b, r) in mono {
            if matches!(b.node(), Node::Add(_)) {
                let fl = r.floor();
                let s = shift.entry(b.clone()).or_insert_with(BigRational::zero);
                if -fl.clone() > *s {
                    *s = -fl;
                }
            }
        }
    }
    let sum_keys: Vec<Expr> = pairs
        .iter()
        .flat_map(|(_, m)| m.keys().filter(|b| matches!(b.node(), Node::Add(_))).cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut acc: BTreeMap<Monomial, Vec<Expr>> = BTreeMap::new();
    for (coef, mut mono) in pairs {
        let mut expansions: Vec<(Vec<Expr>, Monomial)> = vec![(coef, Monomial::new())];
        for b in &sum_keys {
            let r = mono.remove(b).unwrap_or_else(BigRational::zero)
                + shift.get(b).cloned().unwrap_or_else(BigRational::zero);
            let n = r.floor();
            let frac = &r - &n;
            if !frac.is_zero() {
                mono.insert(b.clone(), frac);
            }
            let n: u32 = n.to_integer().try_into().unwrap_or(0);
            if n > 0 {
                let poly = collect_independent(&b.powi(n as i64), vars);
                let mut next = Vec::new();
                for (c, m) in &expansions {
                    for (pm, pc) in &poly {
                        let mut cc = c.clone();
                        cc.push(pc.clone());
                        next.push((cc, mono_mul(m, pm)));
                    }
                }
                expansions = next;
            }
        }
        for (c, m) in expansions {
            acc.entry(mono_mul(&mono, &m)).or_default().push(Expr::mul_all(c));
        }
    }
    acc.into_iter()
        .filter_map(|(m, cs)| {
            let c = Expr::add_all(cs);
            (!c.is_zero()).then_some((m, c))
        })
        .collect()
}
