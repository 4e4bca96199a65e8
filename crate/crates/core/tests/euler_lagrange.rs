mod common;

use std::time::{Duration, Instant};

use common::*;
use lagsym_core::{euler_lagrange, JetContext, Lagrangian};
use lagsym_expr::{zero_test, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_el(l: &Lagrangian, want: &[&str]) {
    let start = Instant::now();
    let got = euler_lagrange(l).unwrap();
    assert!(start.elapsed() < Duration::from_secs(1));
    let want: Vec<Expr> = want.iter().map(|s| e(s)).collect();
    assert_eq!(got, want);
}

#[test]
fn log_weighted_kinetic_term() {
    assert_el(&ex1(), &["-2*x' - 2*t*x''"]);
}

#[test]
fn kepler_equations() {
    assert_el(
        &kepler(),
        &["-m*q1'' - K*q1/(q1^2 + q2^2)^(3/2)", "-m*q2'' - K*q2/(q1^2 + q2^2)^(3/2)"],
    );
}

#[test]
fn mixed_order_system() {
    assert_el(&higher_order(), &["-2*x1''", "2*x2^(4)"]);
}

#[test]
fn emden_fowler_equation() {
    assert_el(&emden_fowler(), &["-2*t*x' - t^2*x'' - t^2*x^5"]);
}

#[test]
fn thomas_fermi_equation() {
    assert_el(&thomas_fermi(), &["-x'' + x^(3/2)/sqrt(t)"]);
}

#[test]
fn free_particle() {
    assert_el(&lagrangian("x'^2", &["x"], &[]), &["-2*x''"]);
}

fn random_poly(rng: &mut ChaCha8Rng, atoms: &[&str], terms: usize, degree: u32) -> Expr {
    Expr::add_all((0..terms).map(|_| {
        let c = Expr::rational(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        let d = rng.gen_range(0..=degree);
        c * Expr::mul_all((0..d).map(|_| e(atoms[rng.gen_range(0..atoms.len())])))
    }))
}

const FIRST_ORDER: [&str; 6] = ["t", "x", "y", "x'", "y'", "a"];
const SECOND_ORDER: [&str; 5] = ["t", "x", "x'", "x''", "a"];

#[test]
fn euler_lagrange_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let (atoms, vars): (&[&str], &[&str]) =
            if case % 2 == 0 { (&FIRST_ORDER, &["x", "y"]) } else { (&SECOND_ORDER, &["x"]) };
        let l1 = random_poly(&mut rng, atoms, 4, 3) + e("x'^2");
        let l2 = random_poly(&mut rng, atoms, 4, 3);
        let c = Expr::rational(rng.gen_range(-7..=7), rng.gen_range(1..=4));
        let order = if case % 2 == 0 { 1 } else { 2 };
        let mk = |expr: Expr| Lagrangian::new(expr, JetContext::new("t", vars, order, &["a"]).unwrap()).unwrap();
        let lhs = euler_lagrange(&mk(&l1 * &c + &l2)).unwrap();
        let e1 = euler_lagrange(&mk(l1.clone())).unwrap();
        let e2 = euler_lagrange(&mk(l2.clone())).unwrap();
        for i in 0..vars.len() {
            assert_eq!(lhs[i], &e1[i] * &c + &e2[i], "{l1} / {l2}");
        }
    }
}

#[test]
fn total_derivatives_are_null_lagrangians() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..100 {
        let (vars, atoms, point): (&[&str], &[&str], &[&str]) = if case % 2 == 0 {
            (&["x"], &["t", "x", "x'", "a"], &["t", "x", "a"])
        } else {
            (&["x", "y"], &FIRST_ORDER, &["t", "x", "y", "a"])
        };
        let ctx = JetContext::new("t", vars, 1, &["a"]).unwrap();
        let base = random_poly(&mut rng, atoms, 4, 3);
        let mut f = random_poly(&mut rng, point, 5, 3);
        if case % 5 == 0 {
            f = f + e("ln(t)*x^2") + e("exp(t)*x");
        }
        let l = Lagrangian::new(base.clone(), ctx.clone()).unwrap();
        let shifted = Lagrangian::new(&base + ctx.total_derivative(&f).unwrap(), ctx).unwrap();
        let a = euler_lagrange(&l).unwrap();
        let b = euler_lagrange(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(zero_test(&(x - y), case).is_zero(), "F = {f}: {x} vs {y}");
        }
    }
}
