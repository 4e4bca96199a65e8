//! Seeded randomized properties of the canonical expression layer.

use std::collections::HashMap;

use lagsym_expr::{diff, from_json, parse, simplify, to_json, BigRational, Expr, RealCtx, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 150;

fn leaf(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..5) {
        0 => Expr::rational(rng.gen_range(-5..=5), rng.gen_range(1..=4)),
        1 => Expr::symbol("t"),
        2 => Expr::symbol("x"),
        3 => Expr::sym(Symbol::derivative("x", 1)),
        _ => Expr::symbol("y"),
    }
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 | 1 => random_expr(rng, depth - 1) + random_expr(rng, depth - 1),
        2 | 3 => random_expr(rng, depth - 1) * random_expr(rng, depth - 1),
        4 => random_expr(rng, depth - 1) - random_expr(rng, depth - 1),
        5 => {
            let e = [Expr::int(2), Expr::int(-1), Expr::rational(1, 2), Expr::rational(-3, 2)]
                [rng.gen_range(0..4)]
            .clone();
            // keep radicands positive
            (leaf_positive(rng) + random_expr(rng, depth - 1).powi(2)).pow(&e)
        }
        6 => match rng.gen_range(0..3) {
            0 => random_expr(rng, depth - 1).sin(),
            1 => random_expr(rng, depth - 1).cos(),
            _ => (random_expr(rng, depth - 1) / Expr::int(4)).exp(),
        },
        _ => (leaf_positive(rng) + random_expr(rng, depth - 1).powi(2)).ln(),
    }
}

fn leaf_positive(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..3) {
        0 => Expr::symbol("t"),
        1 => Expr::symbol("y"),
        _ => Expr::rational(rng.gen_range(1..=4), 2),
    }
}

#[test]
fn simplify_is_idempotent_and_text_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..CASES {
        let e = random_expr(&mut rng, 3);
        let s = simplify(&e);
        assert_eq!(simplify(&s), s, "idempotence for {e}");
        assert_eq!(s, e, "constructors already canonical for {e}");
        let back = parse(&e.to_string()).unwrap_or_else(|err| panic!("{e}: {err}"));
        assert_eq!(back, e, "text round trip\n{}\n{}", to_json(&back), to_json(&e));
        assert_eq!(from_json(&to_json(&e)).unwrap(), e, "json round trip");
    }
}

#[test]
fn derivative_matches_five_point_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut ctx = RealCtx::new(50);
    let h = ctx.pow10(-10);
    let tol = ctx.pow10(-20);
    let floor = ctx.pow10(-10);
    let vars = ["t", "x", "y"].map(Symbol::new);
    let mut checked = 0;
    let mut drawn = 0;
    while checked < CASES {
        drawn += 1;
        assert!(drawn < CASES * 4, "too many samples outside the domain");
        let e = random_expr(&mut rng, 3);
        let wrt = vars[rng.gen_range(0..3)].clone();
        let d = diff(&e, &wrt);
        let mut env: HashMap<Symbol, _> = HashMap::new();
        for s in vars.iter().chain([&Symbol::derivative("x", 1)]) {
            let q: i64 = rng.gen_range(2..=1000);
            let p: i64 = rng.gen_range(q + 1..2 * q);
            env.insert(s.clone(), ctx.rational(&BigRational::new(p.into(), q.into())));
        }
        let at = |ctx: &mut RealCtx, k: i64| {
            let mut env = env.clone();
            let kk = ctx.from_f64(k as f64);
            let off = ctx.mul(&kk, &h);
            let v = ctx.add(&env[&wrt], &off);
            env.insert(wrt.clone(), v);
            ctx.eval(&e, &env)
        };
        let (Ok(f_m2), Ok(f_m1), Ok(f_p1), Ok(f_p2), Ok(exact)) =
            (at(&mut ctx, -2), at(&mut ctx, -1), at(&mut ctx, 1), at(&mut ctx, 2), ctx.eval(&d, &env))
        else {
            continue;
        };
        // (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h
        let eight = ctx.from_f64(8.0);
        let twelve = ctx.from_f64(12.0);
        let num = ctx.sub(
            &ctx.add(&ctx.sub(&f_m2, &ctx.mul(&eight, &f_m1)), &ctx.mul(&eight, &f_p1)),
            &f_p2,
        );
        let fd = ctx.div(&num, &ctx.mul(&twelve, &h));
        let err = ctx.sub(&fd, &exact);
        // relative, with magnitudes below 1e-10 treated as 1e-10
        let scale = if ctx.abs_le(&exact, &floor) { floor.clone() } else { exact.abs() };
        let bound = ctx.mul(&tol, &scale);
        assert!(ctx.abs_le(&err, &bound), "d/d{wrt} of {e}: error {}", ctx.to_f64(&err));
        checked += 1;
    }
}

#[test]
fn derivative_is_linear_and_obeys_product_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let x = Symbol::new("x");
    for i in 0..CASES {
        let a = random_expr(&mut rng, 2);
        let b = random_expr(&mut rng, 2);
        let c = Expr::rational(rng.gen_range(-4..=4), 3);
        let lhs = diff(&(&a * &c + &b), &x);
        let rhs = diff(&a, &x) * &c + diff(&b, &x);
        assert_eq!(lhs, rhs, "linearity");
        let prod = diff(&(&a * &b), &x) - (diff(&a, &x) * &b + &a * diff(&b, &x));
        assert!(
            lagsym_expr::zero_test(&prod, i as u64).is_zero(),
            "product rule for {a} and {b}"
        );
    }
}

#[test]
fn parse_rejects_malformed_input_with_position() {
    for (src, col) in [("2 x", 3), ("x +", 4), ("foo(x)", 1), ("x ** 2", 4), ("(x", 3)] {
        match parse(src) {
            Err(lagsym_expr::ExprError::Parse { pos, .. }) => assert_eq!(pos, col, "{src}"),
            other => panic!("{src}: {other:?}"),
        }
    }
}
