//! Exact symbolic expressions for variational calculus.
//!
//! An [`Expr`] is an immutable tree over [`BigRational`](num_rational::BigRational)
//! constants and [`Symbol`]s with sums, products, powers and the elementary
//! functions `ln`, `exp`, `sin`, `cos`. All constructors return canonical
//! forms, so structural equality is the cheap first stage of every
//! equivalence check and [`zero_test`] is the fallback for the rest.

mod build;
mod collect;
mod diff;
mod error;
mod eval;
mod expr;
mod parse;
mod render;
mod subs;
mod symbol;
mod zero;

pub use build::simplify;
pub use collect::{collect, collect_independent, monomial_expr, Monomial};
pub use diff::diff;
pub use error::{ExprError, Result};
pub use eval::{eval_exact, F64Fn, RealCtx};
pub use expr::{Expr, Func, Node};
pub use parse::parse;
pub use render::{from_json, to_json, to_latex, to_text};
pub use subs::{map_symbols, substitute};
pub use symbol::Symbol;
pub use zero::{sample_zero, zero_test, ZeroVerdict};

pub use astro_float::BigFloat;
pub use num_rational::BigRational;
