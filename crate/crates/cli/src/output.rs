//! Rendering in the three output formats.

use clap::ValueEnum;
use lagsym_expr::{to_json, to_latex, to_text, Expr};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug)]
pub struct Out {
    pub format: Format,
    /// Significant digits for printed floating-point results.
    pub precision: usize,
}

impl Out {
    /// Text or LaTeX, whichever the format asks for.
    pub fn expr(&self, e: &Expr) -> String {
        match self.format {
            Format::Latex => to_latex(e),
            _ => to_text(e),
        }
    }

    pub fn float(&self, x: f64) -> String {
        format!("{:.*e}", self.precision.saturating_sub(1), x)
    }

    pub fn tuple(&self, t: Option<&Expr>, x: &[Expr], vars: &[String]) -> String {
        let mut parts = Vec::new();
        if let Some(t) = t {
            parts.push(format!("T = {}", self.expr(t)));
        }
        for (v, e) in vars.iter().zip(x) {
            let name = if vars.len() == 1 { "X".to_string() } else { format!("X_{v}") };
            parts.push(format!("{name} = {}", self.expr(e)));
        }
        parts.join(", ")
    }
}

/// `{"text": .., "tree": ..}`.
pub fn expr_json(e: &Expr) -> Value {
    json!({"text": to_text(e), "tree": to_json(e)})
}

pub fn generator_json(t: Option<&Expr>, x: &[Expr]) -> Value {
    let mut v = json!({"X": x.iter().map(expr_json).collect::<Vec<_>>()});
    if let Some(t) = t {
        v["T"] = expr_json(t);
    }
    v
}
