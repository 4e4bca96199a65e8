//! Pratt parser for the text form.
//!
//! Grammar notes:
//! - primes mark time derivatives: `x'`, `x''`; `x^(4)` (an unsigned integer
//!   in parentheses directly after a name) is the fourth derivative, while
//!   `x^4` and `x^(2+2)` are powers;
//! - `x[k]`, `x[k+1]`, `x[k-2]` are shifted sequence values;
//! - decimal literals are exact (`0.25` is `1/4`);
//! - multiplication must be explicit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow, Zero};

use crate::error::{ExprError, Result};
use crate::expr::{Expr, Func};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    Ident(String, u32),
    Op(char),
    End,
}

struct Lexed {
    tok: Tok,
    pos: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(ExprError::Parse { pos, msg: msg.into() })
}

fn lex(src: &str) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut int = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                int.push(chars[i]);
                i += 1;
            }
            let mut frac = String::new();
            let mut decimal = false;
            if i < chars.len() && chars[i] == '.' {
                decimal = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
            let d = pow(BigInt::from(10), frac.len());
            out.push(Lexed { tok: Tok::Num(BigRational::new(n, d), !decimal), pos: start });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                name.push(chars[i]);
                i += 1;
            }
            let mut primes = 0;
            while i < chars.len() && chars[i] == '\'' {
                primes += 1;
                i += 1;
            }
            out.push(Lexed { tok: Tok::Ident(name, primes), pos: start });
        } else if "+-*/^()[]".contains(c) {
            out.push(Lexed { tok: Tok::Op(c), pos: start });
            i += 1;
        } else {
            return err(start, format!("unexpected character {c:?}"));
        }
    }
    out.push(Lexed { tok: Tok::End, pos: chars.len() + 1 });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            err(self.pos(), format!("expected '{c}'"))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, l, r) = match self.peek() {
                Tok::Op(c @ ('+' | '-')) => (*c, 1, 2),
                Tok::Op(c @ ('*' | '/')) => (*c, 3, 4),
                Tok::Op('^') => ('^', 7, 6),
                Tok::Num(..) | Tok::Ident(..) | Tok::Op('(') => {
                    return err(self.pos(), "implicit multiplication is not allowed; use '*'");
                }
                _ => break,
            };
            if l < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(r)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                '/' => {
                    if rhs.is_zero() {
                        return err(self.pos(), "division by zero");
                    }
                    lhs / rhs
                }
                _ => lhs.pow(&rhs),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(r, _) => Ok(Expr::num(r)),
            Tok::Op('-') => Ok(-self.expr(5)?),
            Tok::Op('+') => self.expr(5),
            Tok::Op('(') => {
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name, primes) => self.ident(name, primes, pos),
            Tok::End => err(pos, "unexpected end of input"),
            Tok::Op(c) => err(pos, format!("unexpected '{c}'")),
        }
    }

    fn ident(&mut self, name: String, primes: u32, pos: usize) -> Result<Expr> {
        if *self.peek() == Tok::Op('(') {
            if primes > 0 {
                return err(pos, "a derivative symbol cannot be applied");
            }
            self.bump();
            let arg = self.expr(0)?;
            self.expect(')')?;
            return match name.as_str() {
                "sqrt" => Ok(arg.sqrt()),
                _ => match Func::from_name(&name) {
                    Some(f) => Ok(Expr::apply(f, arg)),
                    None => err(pos, format!("unknown function `{name}`")),
                },
            };
        }
        if name == "sqrt" || Func::from_name(&name).is_some() {
            return err(pos, format!("function `{name}` needs a parenthesized argument"));
        }
        if *self.peek() == Tok::Op('[') {
            self.bump();
            let ipos = self.pos();
            match self.bump() {
                Tok::Ident(_, 0) => {}
                _ => return err(ipos, "expected index name inside '[...]'"),
            }
            let mut offset: i64 = 0;
            if let Tok::Op(c @ ('+' | '-')) = self.peek().clone() {
                self.bump();
                let npos = self.pos();
                match self.bump() {
                    Tok::Num(r, true) if r.is_integer() => {
                        let n: i64 = r
                            .numer()
                            .try_into()
                            .map_err(|_| ExprError::Parse { pos: npos, msg: "shift too large".into() })?;
                        offset = if c == '-' { -n } else { n };
                    }
                    _ => return err(npos, "expected integer shift"),
                }
            }
            self.expect(']')?;
            if primes > 0 {
                return err(pos, "shifted symbols cannot carry derivative marks");
            }
            return Ok(Expr::sym(Symbol::shifted(&name, offset)));
        }
        let mut order = primes;
        if primes == 0 && *self.peek() == Tok::Op('^') && *self.peek_at(1) == Tok::Op('(') {
            if let (Tok::Num(r, true), Tok::Op(')')) = (self.peek_at(2).clone(), self.peek_at(3).clone()) {
                if r.is_integer() {
                    let opos = self.toks[self.i + 2].pos;
                    order = r
                        .numer()
                        .try_into()
                        .map_err(|_| ExprError::Parse { pos: opos, msg: "derivative order too large".into() })?;
                    for _ in 0..4 {
                        self.bump();
                    }
                }
            }
        }
        Ok(Expr::sym(Symbol::derivative(&name, order)))
    }
}

/// Parses the text form into a canonical expression.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    if *p.peek() == Tok::End {
        return err(1, "empty expression");
    }
    let e = p.expr(0)?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Op(c) => err(p.pos(), format!("unexpected '{c}'")),
        _ => err(p.pos(), "unexpected token"),
    }
}
