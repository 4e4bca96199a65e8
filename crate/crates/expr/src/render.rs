//! Text, LaTeX and JSON forms. The text form round-trips through [`parse`](crate::parse).

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::error::{ExprError, Result};
use crate::expr::{Expr, Func, Node};
use crate::symbol::Symbol;

fn rat_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Splits a product into (coefficient, numerator factors, denominator factors),
/// moving factors with negative numeric exponents to the denominator.
fn split_fraction(e: &Expr) -> (BigRational, Vec<Expr>, Vec<(Expr, BigRational)>) {
    let (c, rest) = e.split_coeff();
    let mut num = Vec::new();
    let mut den = Vec::new();
    if rest.is_one() {
        return (c, num, den);
    }
    for f in rest.factors() {
        match f.node() {
            Node::Pow(b, x) => match x.node() {
                // (a+b)^(-2) stays put: "1/(a+b)^2" would re-parse as an expanded sum
                Node::Num(r)
                    if r.is_negative()
                        && !(matches!(b.node(), Node::Add(_)) && r.is_integer() && *r != -BigRational::one()) =>
                {
                    den.push((b.clone(), -r.clone()));
                }
                _ => num.push(f.clone()),
            },
            _ => num.push(f.clone()),
        }
    }
    (c, num, den)
}

pub fn to_text(e: &Expr) -> String {
    match e.node() {
        Node::Add(ts) => {
            let mut s = String::new();
            for (i, t) in ts.iter().enumerate() {
                let neg = t.is_negative_term();
                let body = term_text(&if neg { -t } else { t.clone() });
                match (i, neg) {
                    (0, true) => {
                        s.push('-');
                        s.push_str(&body);
                    }
                    (0, false) => s.push_str(&body),
                    (_, true) => {
                        s.push_str(" - ");
                        s.push_str(&body);
                    }
                    (_, false) => {
                        s.push_str(" + ");
                        s.push_str(&body);
                    }
                }
            }
            s
        }
        _ => {
            if e.is_negative_term() && !e.is_num() {
                format!("-{}", term_text(&-e))
            } else {
                term_text(e)
            }
        }
    }
}

/// A term whose coefficient is positive (or a bare negative number).
fn term_text(e: &Expr) -> String {
    if let Node::Num(r) = e.node() {
        return rat_text(r);
    }
    let (c, num, den) = split_fraction(e);
    let mut parts: Vec<String> = Vec::new();
    if !c.is_one() || num.is_empty() {
        parts.push(rat_text(&c));
    }
    parts.extend(num.iter().map(factor_text));
    let mut s = parts.join("*");
    match den.len() {
        0 => {}
        1 => {
            s.push('/');
            s.push_str(&pow_text(&den[0].0, &den[0].1));
        }
        // "/(a+b)/(c+d)" so that re-parsing never multiplies sums out
        _ if den.iter().any(|(b, _)| matches!(b.node(), Node::Add(_))) => {
            for (b, r) in &den {
                s.push('/');
                s.push_str(&pow_text(b, r));
            }
        }
        _ => {
            s.push_str("/(");
            s.push_str(&den.iter().map(|(b, r)| pow_text(b, r)).collect::<Vec<_>>().join("*"));
            s.push(')');
        }
    }
    s
}

/// `b^r` for a positive rational `r`, without re-canonicalizing.
fn pow_text(b: &Expr, r: &BigRational) -> String {
    if r.is_one() {
        factor_text(b)
    } else {
        factor_text(&Expr::from_node(Node::Pow(b.clone(), Expr::num(r.clone()))))
    }
}

fn factor_text(e: &Expr) -> String {
    match e.node() {
        Node::Num(r) => {
            if r.is_integer() && !r.is_negative() {
                rat_text(r)
            } else {
                format!("({})", rat_text(r))
            }
        }
        Node::Sym(s) => s.to_text(),
        Node::Func(f, a) => format!("{}({})", f.name(), to_text(a)),
        Node::Add(_) | Node::Mul(_) => format!("({})", to_text(e)),
        Node::Pow(b, x) => {
            let base = match b.node() {
                Node::Sym(_) | Node::Func(..) => factor_text(b),
                Node::Num(r) if r.is_integer() && !r.is_negative() => factor_text(b),
                _ => format!("({})", to_text(b)),
            };
            let exp = match x.node() {
                Node::Num(r) if r.is_integer() && !r.is_negative() => rat_text(r),
                _ => format!("({})", to_text(x)),
            };
            format!("{base}^{exp}")
        }
    }
}

// ----- LaTeX -----

fn rat_latex(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-\\frac{{{}}}{{{}}}", -r.numer(), r.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

pub fn to_latex(e: &Expr) -> String {
    let mut s = String::new();
    for (i, t) in e.terms().iter().enumerate() {
        let neg = t.is_negative_term();
        let body = term_latex(&if neg { -t } else { t.clone() });
        if neg {
            s.push_str(if i == 0 { "-" } else { " - " });
        } else if i > 0 {
            s.push_str(" + ");
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn term_latex(e: &Expr) -> String {
    if let Node::Num(r) = e.node() {
        return rat_latex(r);
    }
    let (c, num, den) = split_fraction(e);
    let join = |fs: &[Expr]| fs.iter().map(factor_latex).collect::<Vec<_>>().join(" ");
    let numer = if num.is_empty() { "1".to_string() } else { join(&num) };
    if den.is_empty() {
        if c.is_one() {
            numer
        } else if num.is_empty() {
            rat_latex(&c)
        } else {
            format!("{} {}", rat_latex(&c), numer)
        }
    } else {
        let den: Vec<String> = den
            .iter()
            .map(|(b, r)| {
                if r.is_one() {
                    factor_latex(b)
                } else {
                    factor_latex(&Expr::from_node(Node::Pow(b.clone(), Expr::num(r.clone()))))
                }
            })
            .collect();
        let frac = format!("\\frac{{{numer}}}{{{}}}", den.join(" "));
        if c.is_one() {
            frac
        } else {
            format!("{} {}", rat_latex(&c), frac)
        }
    }
}

fn factor_latex(e: &Expr) -> String {
    match e.node() {
        Node::Num(r) => rat_latex(r),
        Node::Sym(s) => s.to_latex(),
        Node::Func(Func::Exp, a) => format!("e^{{{}}}", to_latex(a)),
        Node::Func(f, a) => format!("\\{}\\left({}\\right)", f.name(), to_latex(a)),
        Node::Add(_) | Node::Mul(_) => format!("\\left({}\\right)", to_latex(e)),
        Node::Pow(b, x) => {
            if let Node::Num(r) = x.node() {
                if *r == BigRational::new(1.into(), 2.into()) {
                    return format!("\\sqrt{{{}}}", to_latex(b));
                }
            }
            let base = match b.node() {
                Node::Sym(_) => factor_latex(b),
                Node::Num(r) if r.is_integer() && !r.is_negative() => factor_latex(b),
                _ => format!("\\left({}\\right)", to_latex(b)),
            };
            format!("{base}^{{{}}}", to_latex(x))
        }
    }
}

// ----- JSON -----

pub fn to_json(e: &Expr) -> Value {
    match e.node() {
        Node::Num(r) => json!({"op": "num", "value": rat_text(r)}),
        Node::Sym(s) => {
            let mut v = json!({"op": "sym", "name": s.name(), "order": s.deriv_order()});
            if let Some(k) = s.shift() {
                v["shift"] = json!(k);
            }
            v
        }
        Node::Add(xs) => json!({"op": "add", "args": xs.iter().map(to_json).collect::<Vec<_>>()}),
        Node::Mul(xs) => json!({"op": "mul", "args": xs.iter().map(to_json).collect::<Vec<_>>()}),
        Node::Pow(b, x) => json!({"op": "pow", "args": [to_json(b), to_json(x)]}),
        Node::Func(f, a) => json!({"op": f.name(), "args": [to_json(a)]}),
    }
}

pub fn from_json(v: &Value) -> Result<Expr> {
    let bad = |m: &str| ExprError::Json(m.to_string());
    let op = v
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing \"op\""))?;
    let args = || -> Result<Vec<Expr>> {
        v.get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"args\""))?
            .iter()
            .map(from_json)
            .collect()
    };
    match op {
        "num" => {
            let s = v
                .get("value")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("num without string \"value\""))?;
            let r: BigRational = s.parse().map_err(|_| bad(&format!("bad number {s:?}")))?;
            Ok(Expr::num(r))
        }
        "sym" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("sym without \"name\""))?;
            let order = v.get("order").and_then(Value::as_u64).unwrap_or(0) as u32;
            let sym = match v.get("shift").and_then(Value::as_i64) {
                Some(k) => Symbol::shifted(name, k),
                None => Symbol::derivative(name, order),
            };
            Ok(Expr::sym(sym))
        }
        "add" => Ok(Expr::add_all(args()?)),
        "mul" => Ok(Expr::mul_all(args()?)),
        "pow" => match args()?.as_slice() {
            [b, x] => Ok(b.pow(x)),
            _ => Err(bad("pow takes two args")),
        },
        name => {
            let f = Func::from_name(name).ok_or_else(|| bad(&format!("unknown op {name:?}")))?;
            match args()?.as_slice() {
                [a] => Ok(Expr::apply(f, a.clone())),
                _ => Err(bad("functions take one arg")),
            }
        }
    }
}
