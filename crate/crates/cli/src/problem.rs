//! Problem descriptions: TOML files, command-line flags and the `problem`
//! block of an earlier run's JSON output, merged in that order of priority
//! (flags win).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use lagsym_core::{
    discrete_ansatz, AnsatzSpec, DiscreteLagrangian, DiscreteSetup, Generator, Lagrangian, NumericSetup,
};
use lagsym_expr::{eval_exact, from_json, F64Fn, parse, BigRational, Expr, Symbol};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Continuous,
    Discrete,
}

/// A value written either as expression text or as a bare TOML/JSON number.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueText {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ValueText {
    fn to_expr(&self) -> Result<Expr> {
        match self {
            ValueText::Int(i) => Ok(Expr::int(*i)),
            ValueText::Float(f) => BigRational::from_float(*f)
                .map(Expr::num)
                .ok_or_else(|| CliError::Invalid(format!("non-finite value {f}"))),
            ValueText::Text(s) => Ok(parse(s)?),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AnsatzFile {
    pub degree: Option<u32>,
    pub atoms: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NumericFile {
    pub t0: Option<f64>,
    pub horizon: Option<f64>,
    pub state: Option<Vec<f64>>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DiscreteFile {
    pub steps: Option<usize>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
}

/// On-disk layout, shared by TOML problem files and the JSON `problem` block.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default)]
    pub kind: Kind,
    pub lagrangian: Option<String>,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    pub time: Option<String>,
    pub index: Option<String>,
    pub order: Option<u32>,
    #[serde(default)]
    pub ansatz: AnsatzFile,
    #[serde(default)]
    pub generators: BTreeMap<String, ValueText>,
    #[serde(default)]
    pub set: BTreeMap<String, ValueText>,
    pub numeric: Option<NumericFile>,
    #[serde(default)]
    pub discrete: DiscreteFile,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            return match v.get("problem") {
                Some(p) => Self::from_json(p),
                None => Err(CliError::Invalid(format!("{}: no \"problem\" block", path.display()))),
            };
        }
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| CliError::Parse(format!("problem block: {e}")))
    }

    /// Overlays `top` on `self`: fields present in `top` win.
    pub fn merge(mut self, top: ProblemFile) -> ProblemFile {
        if top.kind != Kind::default() {
            self.kind = top.kind;
        }
        self.lagrangian = top.lagrangian.or(self.lagrangian);
        if !top.variables.is_empty() {
            self.variables = top.variables;
        }
        if !top.parameters.is_empty() {
            self.parameters = top.parameters;
        }
        self.time = top.time.or(self.time);
        self.index = top.index.or(self.index);
        self.order = top.order.or(self.order);
        self.ansatz.degree = top.ansatz.degree.or(self.ansatz.degree);
        self.ansatz.atoms = top.ansatz.atoms.or(self.ansatz.atoms);
        if !top.generators.is_empty() {
            self.generators = top.generators;
        }
        self.set.extend(top.set);
        self.numeric = match (self.numeric, top.numeric) {
            (Some(a), Some(b)) => Some(NumericFile {
                t0: b.t0.or(a.t0),
                horizon: b.horizon.or(a.horizon),
                state: b.state.or(a.state),
                tol: b.tol.or(a.tol),
            }),
            (a, b) => b.or(a),
        };
        self.discrete.steps = top.discrete.steps.or(self.discrete.steps);
        self.discrete.trials = top.discrete.trials.or(self.discrete.trials);
        self.discrete.tol = top.discrete.tol.or(self.discrete.tol);
        self
    }
}

/// A fully merged problem, ready to build core objects from.
#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
}

impl Problem {
    pub fn new(file: ProblemFile) -> Result<Self> {
        if file.lagrangian.is_none() {
            return Err(CliError::Invalid("no Lagrangian given (use FILE or -L)".into()));
        }
        if file.variables.is_empty() {
            return Err(CliError::Invalid("no dependent variables given (use -x)".into()));
        }
        Ok(Problem { file })
    }

    fn source(&self) -> &str {
        self.file.lagrangian.as_deref().unwrap_or_default()
    }

    fn names(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    pub fn variables(&self) -> &[String] {
        &self.file.variables
    }

    pub fn time(&self) -> &str {
        self.file.time.as_deref().unwrap_or("t")
    }

    pub fn index(&self) -> &str {
        self.file.index.as_deref().unwrap_or("k")
    }

    fn expect(&self, kind: Kind) -> Result<()> {
        if self.file.kind != kind {
            let name = if kind == Kind::Discrete { "discrete" } else { "continuous" };
            return Err(CliError::Invalid(format!("this command needs a {name} problem")));
        }
        Ok(())
    }

    pub fn lagrangian(&self) -> Result<Lagrangian> {
        self.expect(Kind::Continuous)?;
        let vars = Self::names(&self.file.variables);
        let params = Self::names(&self.file.parameters);
        Ok(Lagrangian::parse(self.source(), self.time(), &vars, &params, self.file.order)?)
    }

    pub fn discrete(&self) -> Result<DiscreteLagrangian> {
        self.expect(Kind::Discrete)?;
        let vars = Self::names(&self.file.variables);
        let params = Self::names(&self.file.parameters);
        Ok(DiscreteLagrangian::parse(self.source(), self.index(), &vars, &params, self.file.order)?)
    }

    pub fn ansatz(&self) -> Result<AnsatzSpec> {
        let mut spec = match self.file.kind {
            Kind::Continuous => AnsatzSpec::default(),
            Kind::Discrete => discrete_ansatz(2),
        };
        if let Some(d) = self.file.ansatz.degree {
            spec.degree = d;
        }
        if let Some(atoms) = &self.file.ansatz.atoms {
            spec.atoms = atoms.iter().map(|a| parse(a)).collect::<std::result::Result<_, _>>()?;
        }
        Ok(spec)
    }

    fn is_param(&self, name: &str) -> bool {
        self.file.parameters.iter().any(|p| p == name)
    }

    /// `--set` entries naming something other than a parameter: substituted
    /// symbolically into generators.
    pub fn label_values(&self) -> Result<HashMap<Symbol, Expr>> {
        self.file
            .set
            .iter()
            .filter(|(k, _)| !self.is_param(k))
            .map(|(k, v)| Ok((Symbol::new(k), v.to_expr()?)))
            .collect()
    }

    /// `--set` entries naming a parameter: numeric values for verification.
    pub fn param_values(&self) -> Result<HashMap<String, BigRational>> {
        self.file
            .set
            .iter()
            .filter(|(k, _)| self.is_param(k))
            .map(|(k, v)| {
                let e = v.to_expr()?;
                let r = eval_exact(&e, &HashMap::new())
                    .ok_or_else(|| CliError::Invalid(format!("value of {k} is not a rational number: {e}")))?;
                Ok((k.clone(), r))
            })
            .collect()
    }

    /// Generator components from the problem file, if any.
    pub fn file_generator(&self) -> Result<Option<GenInput>> {
        if self.file.generators.is_empty() {
            return Ok(None);
        }
        let named = self
            .file
            .generators
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.to_expr()?)))
            .collect::<Result<_>>()?;
        Ok(Some(GenInput::Named(named)))
    }

    pub fn has_numeric(&self) -> bool {
        self.file.numeric.is_some()
    }

    /// Parameters without a value default to 1, and so do leftover labels
    /// in the law (which is linear in them).
    pub fn numeric_setup(&self, l: &Lagrangian, seed: u64) -> Result<NumericSetup> {
        let num = self.file.numeric.clone().unwrap_or_default();
        let dim: u32 = (0..l.ctx.n()).map(|v| 2 * l.var_order(v)).sum();
        let state = match num.state {
            Some(s) => s,
            None => {
                log::warn!("no initial state given; using a fixed default");
                (0..dim).map(|i| 0.5 + 0.1 * f64::from(i) + (seed % 7) as f64 * 0.01).collect()
            }
        };
        let mut setup = NumericSetup::new(num.t0.unwrap_or(1.0), num.horizon.unwrap_or(5.0), state);
        if let Some(tol) = num.tol {
            setup.tol = tol;
        }
        let values = self.param_values()?;
        for p in &self.file.parameters {
            let v = match values.get(p) {
                Some(r) => rational_f64(r),
                None => {
                    log::warn!("parameter {p} has no value; using 1");
                    1.0
                }
            };
            setup = setup.param(p, v);
        }
        Ok(setup)
    }

    pub fn discrete_setup(&self, seed: u64) -> Result<DiscreteSetup> {
        let d = &self.file.discrete;
        let mut setup = DiscreteSetup::new(d.steps.unwrap_or(50), d.trials.unwrap_or(3), seed);
        let values = self.param_values()?;
        for p in &self.file.parameters {
            let v = values.get(p).cloned().unwrap_or_else(|| {
                log::warn!("parameter {p} has no value; using 1");
                BigRational::from_integer(1.into())
            });
            setup.params.insert(p.clone(), v);
        }
        Ok(setup)
    }

    pub fn discrete_tol(&self) -> f64 {
        self.file.discrete.tol.unwrap_or(1e-9)
    }

    /// The problem block written into JSON output; `ProblemFile` reads it back.
    pub fn to_json(&self) -> Value {
        let f = &self.file;
        let mut v = json!({
            "kind": f.kind,
            "lagrangian": f.lagrangian,
            "variables": f.variables,
            "parameters": f.parameters,
        });
        match f.kind {
            Kind::Continuous => v["time"] = json!(self.time()),
            Kind::Discrete => v["index"] = json!(self.index()),
        }
        if let Some(o) = f.order {
            v["order"] = json!(o);
        }
        if f.ansatz.degree.is_some() || f.ansatz.atoms.is_some() {
            v["ansatz"] = json!(f.ansatz);
        }
        let params: BTreeMap<_, _> = f.set.iter().filter(|(k, _)| self.is_param(k)).collect();
        if !params.is_empty() {
            v["set"] = json!(params);
        }
        if let Some(n) = &f.numeric {
            v["numeric"] = json!(n);
        }
        if f.kind == Kind::Discrete {
            v["discrete"] = json!(f.discrete);
        }
        v
    }
}

fn rational_f64(r: &BigRational) -> f64 {
    F64Fn::compile(&Expr::num(r.clone()), &[]).map_or(f64::NAN, |f| f.eval(&[]))
}

/// Generator components as supplied by the user.
#[derive(Clone, Debug)]
pub enum GenInput {
    /// `T` and variable names mapped to components; missing ones are 0.
    Named(BTreeMap<String, Expr>),
    /// Components in variable order, as in JSON output.
    Ordered { t: Option<Expr>, x: Vec<Expr> },
}

impl GenInput {
    pub fn continuous(&self, vars: &[String]) -> Result<Generator> {
        match self {
            GenInput::Named(m) => {
                for k in m.keys() {
                    if k != "T" && !vars.contains(k) {
                        return Err(CliError::Invalid(format!("generator component {k} is neither T nor a variable")));
                    }
                }
                let get = |k: &str| m.get(k).cloned().unwrap_or_else(Expr::zero);
                Ok(Generator::new(get("T"), vars.iter().map(|v| get(v)).collect()))
            }
            GenInput::Ordered { t, x } => Ok(Generator::new(t.clone().unwrap_or_else(Expr::zero), x.clone())),
        }
    }

    pub fn discrete(&self, vars: &[String]) -> Result<Vec<Expr>> {
        match self {
            GenInput::Named(m) => {
                for (k, v) in m {
                    if k == "T" && v.is_zero() {
                        continue;
                    }
                    if !vars.contains(k) {
                        return Err(CliError::Invalid(format!("generator component {k} is not a variable")));
                    }
                }
                Ok(vars.iter().map(|v| m.get(v).cloned().unwrap_or_else(Expr::zero)).collect())
            }
            GenInput::Ordered { t, x } => {
                if t.as_ref().is_some_and(|t| !t.is_zero()) {
                    return Err(CliError::Invalid("discrete generators have no T component".into()));
                }
                Ok(x.clone())
            }
        }
    }
}

/// Parses `NAME=VALUE`.
pub fn split_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::Invalid(format!("expected NAME=VALUE, got {s:?}")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(CliError::Invalid(format!("empty name in {s:?}")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

fn expr_value(v: &Value) -> Result<Expr> {
    match v {
        Value::String(s) => Ok(parse(s)?),
        Value::Number(n) => Ok(parse(&n.to_string())?),
        Value::Object(o) => match (o.get("tree"), o.get("text")) {
            (Some(tree), _) => Ok(from_json(tree)?),
            (None, Some(Value::String(s))) => Ok(parse(s)?),
            _ => Ok(from_json(v)?),
        },
        _ => Err(CliError::Parse(format!("expected an expression, got {v}"))),
    }
}

/// A generator document: JSON output of `symmetries` or `noether`, a bare
/// JSON `{"T": .., "X": [..]}`, or TOML `NAME = "expr"` lines (optionally
/// under `[generators]`). JSON may also carry the problem.
pub fn read_generators(text: &str, origin: &str) -> Result<(GenInput, Option<ProblemFile>)> {
    let bad = |e: String| CliError::Parse(format!("{origin}: {e}"));
    if !text.trim_start().starts_with('{') {
        let table: toml::Table = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let table = match table.get("generators") {
            Some(toml::Value::Table(t)) => t.clone(),
            _ => table,
        };
        let mut named = BTreeMap::new();
        for (k, v) in table {
            let e = match v {
                toml::Value::String(s) => parse(&s)?,
                toml::Value::Integer(i) => Expr::int(i),
                other => return Err(bad(format!("{k}: expected an expression, got {other}"))),
            };
            named.insert(k, e);
        }
        return Ok((GenInput::Named(named), None));
    }
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let problem = v.get("problem").map(ProblemFile::from_json).transpose()?;
    let g = v
        .get("family")
        .and_then(|f| f.get("combined"))
        .or_else(|| v.get("generator"))
        .unwrap_or(&v);
    let t = g.get("T").map(expr_value).transpose()?;
    let x = match g.get("X") {
        Some(Value::Array(xs)) => xs.iter().map(expr_value).collect::<Result<Vec<_>>>()?,
        Some(other) => vec![expr_value(other)?],
        None => return Err(bad("no generator found (expected \"family\", \"generator\" or \"X\")".into())),
    };
    Ok((GenInput::Ordered { t, x }, problem))
}
