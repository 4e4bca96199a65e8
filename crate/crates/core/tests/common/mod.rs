#![allow(dead_code)]

use lagsym_core::{Generator, Lagrangian};
use lagsym_expr::{parse, Expr};

pub fn lagrangian(src: &str, vars: &[&str], params: &[&str]) -> Lagrangian {
    Lagrangian::parse(src, "t", vars, params, None).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn ex1() -> Lagrangian {
    lagrangian("t*x'^2", &["x"], &[])
}

pub fn kepler() -> Lagrangian {
    lagrangian("m/2*(q1'^2 + q2'^2) + K/sqrt(q1^2 + q2^2)", &["q1", "q2"], &["m", "K"])
}

pub fn higher_order() -> Lagrangian {
    lagrangian("x1'^2 + x2''^2", &["x1", "x2"], &[])
}

pub fn emden_fowler() -> Lagrangian {
    lagrangian("t^2/2*(x'^2 - x^6/3)", &["x"], &[])
}

pub fn oscillator() -> Lagrangian {
    lagrangian("1/2*(m*x'^2 - k*x^2)*exp(a/m*t)", &["x"], &["m", "k", "a"])
}

pub fn thomas_fermi() -> Lagrangian {
    lagrangian("1/2*x'^2 + 2/5*x^(5/2)/sqrt(t)", &["x"], &[])
}

pub fn e(src: &str) -> Expr {
    parse(src).unwrap_or_else(|err| panic!("{src}: {err}"))
}

pub fn gen(t: &str, x: &[&str]) -> Generator {
    Generator::new(e(t), x.iter().map(|s| e(s)).collect())
}
