//! Exact, multiprecision and compiled `f64` evaluation.

use std::collections::HashMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{ExprError, Result};
use crate::expr::{Expr, Func, Node};
use crate::subs::substitute;
use crate::symbol::Symbol;

/// Substitutes rational values and returns the result if it folds to a number.
pub fn eval_exact(e: &Expr, env: &HashMap<Symbol, BigRational>) -> Option<BigRational> {
    let map = env.iter().map(|(s, v)| (s.clone(), Expr::num(v.clone()))).collect();
    substitute(e, &map).as_num().cloned()
}

/// Multiprecision real arithmetic at a fixed number of decimal digits.
pub struct RealCtx {
    p: usize,
    rm: RoundingMode,
    cc: Consts,
}

impl RealCtx {
    /// Working precision of `digits` decimal digits plus 64 guard bits.
    pub fn new(digits: usize) -> Self {
        RealCtx {
            p: (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64,
            rm: RoundingMode::ToEven,
            cc: Consts::new().expect("constant cache allocation"),
        }
    }

    pub fn rational(&mut self, r: &BigRational) -> BigFloat {
        let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, self.p, self.rm, &mut self.cc);
        if r.denom().to_u64() == Some(1) {
            return n;
        }
        let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, self.p, self.rm, &mut self.cc);
        n.div(&d, self.p, self.rm)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn to_f64(&mut self, x: &BigFloat) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        x.format(Radix::Dec, self.rm, &mut self.cc)
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .unwrap_or(f64::NAN)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, self.rm)
    }

    /// `|a| <= tol`.
    pub fn abs_le(&self, a: &BigFloat, tol: &BigFloat) -> bool {
        matches!(a.abs().cmp(tol), Some(c) if c <= 0)
    }

    pub fn eval(&mut self, e: &Expr, env: &HashMap<Symbol, BigFloat>) -> Result<BigFloat> {
        let v = match e.node() {
            Node::Num(r) => self.rational(r),
            Node::Sym(s) => env
                .get(s)
                .cloned()
                .ok_or_else(|| ExprError::Unbound(s.to_text()))?,
            Node::Add(ts) => {
                let mut acc = BigFloat::from_u8(0, self.p);
                for t in ts {
                    let v = self.eval(t, env)?;
                    acc = acc.add(&v, self.p, self.rm);
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = BigFloat::from_u8(1, self.p);
                for f in fs {
                    let v = self.eval(f, env)?;
                    acc = acc.mul(&v, self.p, self.rm);
                }
                acc
            }
            Node::Pow(b, x) => {
                let bv = self.eval(b, env)?;
                match x.node() {
                    Node::Num(r) => self.pow_rational(&bv, r)?,
                    _ => {
                        let xv = self.eval(x, env)?;
                        if !bv.is_positive() {
                            return Err(ExprError::Domain(format!("non-positive base in {e}")));
                        }
                        bv.pow(&xv, self.p, self.rm, &mut self.cc)
                    }
                }
            }
            Node::Func(f, a) => {
                let av = self.eval(a, env)?;
                match f {
                    Func::Ln => {
                        if !av.is_positive() {
                            return Err(ExprError::Domain(format!("logarithm of non-positive value in {e}")));
                        }
                        av.ln(self.p, self.rm, &mut self.cc)
                    }
                    Func::Exp => av.exp(self.p, self.rm, &mut self.cc),
                    Func::Sin => av.sin(self.p, self.rm, &mut self.cc),
                    Func::Cos => av.cos(self.p, self.rm, &mut self.cc),
                }
            }
        };
        if v.is_nan() || v.is_inf() {
            return Err(ExprError::Domain(format!("non-finite value in {e}")));
        }
        Ok(v)
    }

    fn pow_rational(&mut self, b: &BigFloat, r: &BigRational) -> Result<BigFloat> {
        if b.is_zero() {
            return if r.is_positive() {
                Ok(BigFloat::from_u8(0, self.p))
            } else {
                Err(ExprError::Domain("zero raised to a non-positive power".into()))
            };
        }
        if r.is_integer() {
            let n = r
                .numer()
                .abs()
                .to_usize()
                .ok_or_else(|| ExprError::Domain("exponent too large".into()))?;
            let v = b.powi(n, self.p, self.rm);
            return Ok(if r.is_negative() { v.reciprocal(self.p, self.rm) } else { v });
        }
        let rf = self.rational(r);
        if b.is_negative() {
            if r.denom().to_u64().is_some_and(|d| d % 2 == 1) {
                let v = b.abs().pow(&rf, self.p, self.rm, &mut self.cc);
                let odd = r.numer().to_i64().is_some_and(|n| n % 2 != 0);
                return Ok(if odd { v.neg() } else { v });
            }
            return Err(ExprError::Domain("even root of a negative value".into()));
        }
        Ok(b.pow(&rf, self.p, self.rm, &mut self.cc))
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Add(Vec<Op>),
    Mul(Vec<Op>),
    PowI(Box<Op>, i32),
    PowF(Box<Op>, f64),
    Pow(Box<Op>, Box<Op>),
    Func(Func, Box<Op>),
}

/// An expression compiled for fast `f64` evaluation over a fixed variable list.
#[derive(Clone, Debug)]
pub struct F64Fn {
    op: Op,
}

impl F64Fn {
    pub fn compile(e: &Expr, vars: &[Symbol]) -> Result<F64Fn> {
        let index: HashMap<&Symbol, usize> = vars.iter().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(F64Fn { op: compile(e, &index)? })
    }

    pub fn eval(&self, vals: &[f64]) -> f64 {
        run(&self.op, vals)
    }
}

fn compile(e: &Expr, index: &HashMap<&Symbol, usize>) -> Result<Op> {
    Ok(match e.node() {
        Node::Num(r) => Op::Const(r.to_f64().unwrap_or(f64::NAN)),
        Node::Sym(s) => Op::Var(*index.get(s).ok_or_else(|| ExprError::Unbound(s.to_text()))?),
        Node::Add(ts) => Op::Add(ts.iter().map(|t| compile(t, index)).collect::<Result<_>>()?),
        Node::Mul(fs) => Op::Mul(fs.iter().map(|f| compile(f, index)).collect::<Result<_>>()?),
        Node::Pow(b, x) => {
            let bo = Box::new(compile(b, index)?);
            match x.as_num() {
                Some(r) if r.is_integer() && r.numer().to_i32().is_some() => {
                    Op::PowI(bo, r.numer().to_i32().unwrap())
                }
                Some(r) => Op::PowF(bo, r.to_f64().unwrap_or(f64::NAN)),
                None => Op::Pow(bo, Box::new(compile(x, index)?)),
            }
        }
        Node::Func(f, a) => Op::Func(*f, Box::new(compile(a, index)?)),
    })
}

fn run(op: &Op, v: &[f64]) -> f64 {
    match op {
        Op::Const(c) => *c,
        Op::Var(i) => v[*i],
        Op::Add(xs) => xs.iter().map(|x| run(x, v)).sum(),
        Op::Mul(xs) => xs.iter().map(|x| run(x, v)).product(),
        Op::PowI(b, n) => run(b, v).powi(*n),
        Op::PowF(b, x) => run(b, v).powf(*x),
        Op::Pow(b, x) => run(b, v).powf(run(x, v)),
        Op::Func(f, a) => {
            let a = run(a, v);
            match f {
                Func::Ln => a.ln(),
                Func::Exp => a.exp(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
            }
        }
    }
}

impl RealCtx {
    /// Binary precision in bits.
    pub fn precision(&self) -> usize {
        self.p
    }

    /// `10^k` at working precision.
    pub fn pow10(&mut self, k: i32) -> BigFloat {
        let ten = BigFloat::from_u8(10, self.p);
        let v = ten.powi(k.unsigned_abs() as usize, self.p, self.rm);
        if k < 0 {
            v.reciprocal(self.p, self.rm)
        } else {
            v
        }
    }
}

impl Default for RealCtx {
    fn default() -> Self {
        RealCtx::new(50)
    }
}
