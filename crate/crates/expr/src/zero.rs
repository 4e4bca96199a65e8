//! Deciding whether an expression is identically zero.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collect::collect_independent;
use crate::eval::RealCtx;
use crate::expr::Expr;
use crate::symbol::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroVerdict {
    /// Proven zero by exact canonical simplification.
    Zero,
    /// Proven or observed nonzero.
    NonZero,
    /// Vanished at every random sample point; not proven.
    ProbablyZero,
}

impl ZeroVerdict {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroVerdict::NonZero)
    }
}

const SAMPLES: usize = 25;
const DIGITS: usize = 50;
const REL_TOL_EXP: i32 = -30;

/// Tests `e == 0` for all positive values of its symbols.
///
/// Canonical forms decide Laurent polynomials exactly. Other expressions are
/// first collected over all their symbols (which proves radical identities
/// exact); what remains is sampled at rational points in (1, 2) with 50-digit
/// arithmetic, accepting `|e| <= 1e-30 * max(1, max |term|)`.
pub fn zero_test(e: &Expr, seed: u64) -> ZeroVerdict {
    if e.is_zero() {
        return ZeroVerdict::Zero;
    }
    if e.is_laurent_polynomial() {
        return ZeroVerdict::NonZero;
    }
    let vars: Vec<Symbol> = e.free_symbols().into_iter().collect();
    if collect_independent(e, &vars).is_empty() {
        return ZeroVerdict::Zero;
    }

    if !sample_zero(e, seed, SAMPLES) {
        return ZeroVerdict::NonZero;
    }
    log::debug!("probabilistic zero verdict for {e}");
    ZeroVerdict::ProbablyZero
}

/// True when `|e| <= 1e-30 * max(1, max |term|)` at `samples` random points
/// with every symbol drawn as a rational in (1, 2) with denominator at most 1000.
pub fn sample_zero(e: &Expr, seed: u64, samples: usize) -> bool {
    let vars: Vec<Symbol> = e.free_symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ctx = RealCtx::new(DIGITS);
    let rel = ctx.pow10(REL_TOL_EXP);
    let terms = e.terms();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples {
        attempts += 1;
        if attempts > samples * 8 {
            // too many domain failures to decide
            log::warn!("zero test could not sample {e}");
            return false;
        }
        let env: HashMap<Symbol, _> = vars
            .iter()
            .map(|s| {
                let q: i64 = rng.gen_range(2..=1000);
                let p: i64 = rng.gen_range(q + 1..2 * q);
                (s.clone(), ctx.rational(&BigRational::new(BigInt::from(p), BigInt::from(q))))
            })
            .collect();
        let mut total = ctx.from_f64(0.0);
        let mut scale = ctx.from_f64(1.0);
        let mut ok = true;
        for t in &terms {
            match ctx.eval(t, &env) {
                Ok(v) => {
                    let a = v.abs();
                    if matches!(a.cmp(&scale), Some(c) if c > 0) {
                        scale = a;
                    }
                    total = ctx.add(&total, &v);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let tol = ctx.mul(&rel, &scale);
        if !ctx.abs_le(&total, &tol) {
            return false;
        }
        accepted += 1;
    }
    true
}
