use std::fmt;
use std::sync::Arc;

/// A named atom, optionally decorated with a derivative order (`x''`) or a
/// discrete shift relative to the index variable (`x[k+1]`).
///
/// Ordering is by name, then derivative order, then shift.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    deriv: u32,
    shift: Option<i64>,
}

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol {
            name: Arc::from(name),
            deriv: 0,
            shift: None,
        }
    }

    /// The `order`-th derivative symbol of `name`; order 0 is the plain symbol.
    pub fn derivative(name: &str, order: u32) -> Self {
        Symbol {
            name: Arc::from(name),
            deriv: order,
            shift: None,
        }
    }

    /// `name[k + offset]`.
    pub fn shifted(name: &str, offset: i64) -> Self {
        Symbol {
            name: Arc::from(name),
            deriv: 0,
            shift: Some(offset),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn deriv_order(&self) -> u32 {
        self.deriv
    }

    pub fn shift(&self) -> Option<i64> {
        self.shift
    }

    /// Same base name with a different derivative order.
    pub fn with_order(&self, order: u32) -> Self {
        Symbol {
            name: self.name.clone(),
            deriv: order,
            shift: None,
        }
    }

    /// Same base name, shift moved by `by` (a plain symbol is treated as shift 0).
    pub fn shifted_by(&self, by: i64) -> Self {
        Symbol {
            name: self.name.clone(),
            deriv: self.deriv,
            shift: Some(self.shift.unwrap_or(0) + by),
        }
    }

    /// Text form accepted by the parser.
    pub fn to_text(&self) -> String {
        let mut s = self.name.to_string();
        if let Some(off) = self.shift {
            match off.cmp(&0) {
                std::cmp::Ordering::Equal => s.push_str("[k]"),
                std::cmp::Ordering::Greater => s.push_str(&format!("[k+{off}]")),
                std::cmp::Ordering::Less => s.push_str(&format!("[k-{}]", -off)),
            }
        }
        match self.deriv {
            0 => {}
            1..=3 => s.push_str(&"'".repeat(self.deriv as usize)),
            k => s.push_str(&format!("^({k})")),
        }
        s
    }

    pub fn to_latex(&self) -> String {
        let base = latex_name(&self.name);
        let mut s = match self.deriv {
            0 => base,
            1 => format!("\\dot{{{base}}}"),
            2 => format!("\\ddot{{{base}}}"),
            3 => format!("\\dddot{{{base}}}"),
            k => format!("{base}^{{({k})}}"),
        };
        if let Some(off) = self.shift {
            match off.cmp(&0) {
                std::cmp::Ordering::Equal => s.push_str("(k)"),
                std::cmp::Ordering::Greater => s.push_str(&format!("(k+{off})")),
                std::cmp::Ordering::Less => s.push_str(&format!("(k-{})", -off)),
            }
        }
        s
    }
}

/// `q1` -> `q_{1}`, `x_ab` -> `x_{ab}`.
fn latex_name(name: &str) -> String {
    if let Some((head, tail)) = name.split_once('_') {
        if !head.is_empty() && !tail.is_empty() {
            return format!("{head}_{{{tail}}}");
        }
    }
    let split = name
        .char_indices()
        .find(|(i, c)| *i > 0 && c.is_ascii_digit() && name[*i..].chars().all(|d| d.is_ascii_digit()))
        .map(|(i, _)| i);
    match split {
        Some(i) => format!("{}_{{{}}}", &name[..i], &name[i..]),
        None if name.chars().count() > 1 => format!("\\mathrm{{{name}}}"),
        None => name.to_string(),
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms() {
        assert_eq!(Symbol::derivative("x", 1).to_text(), "x'");
        assert_eq!(Symbol::derivative("x", 3).to_text(), "x'''");
        assert_eq!(Symbol::derivative("x", 4).to_text(), "x^(4)");
        assert_eq!(Symbol::shifted("x", 2).to_text(), "x[k+2]");
        assert_eq!(Symbol::shifted("x", 0).to_text(), "x[k]");
        assert_eq!(Symbol::shifted("x", -1).to_text(), "x[k-1]");
    }

    #[test]
    fn latex_forms() {
        assert_eq!(Symbol::derivative("q1", 1).to_latex(), "\\dot{q_{1}}");
        assert_eq!(Symbol::new("t").to_latex(), "t");
        assert_eq!(Symbol::derivative("x", 4).to_latex(), "x^{(4)}");
    }

    #[test]
    fn ordering_is_name_then_order() {
        let a = Symbol::new("t");
        let b = Symbol::derivative("x", 2);
        let c = Symbol::derivative("x", 1);
        let mut v = vec![b.clone(), a.clone(), c.clone()];
        v.sort();
        assert_eq!(v, vec![a, c, b]);
    }
}
