//! `lagsym`: Euler-Lagrange equations, variational symmetries and Noether
//! conservation laws from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 unreadable input, 3 invalid
//! problem, 4 empty symmetry family (unless `--empty-ok`), 5 failed
//! verification.

mod commands;
mod error;
mod output;
mod problem;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lagsym_expr::parse;
use serde_json::json;

use commands::{Report, Run};
use error::{CliError, Result};
use output::{Format, Out, SCHEMA};
use problem::{
    read_generators, split_assignment, AnsatzFile, DiscreteFile, GenInput, Kind, NumericFile, Problem, ProblemFile,
    ValueText,
};

#[derive(Parser, Debug)]
#[command(name = "lagsym", version, about = "Euler-Lagrange equations, variational symmetries and Noether laws")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for the randomized zero tests and initial data.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    /// Significant digits of printed floating-point results.
    #[arg(long, default_value_t = 6, global = true)]
    precision: usize,
    #[arg(long, value_name = "D", global = true)]
    ansatz_degree: Option<u32>,
    /// Extra basis atom (repeatable); replaces the default atoms.
    #[arg(long = "ansatz-atom", value_name = "EXPR", global = true, allow_hyphen_values = true)]
    ansatz_atom: Vec<String>,
    /// Assign a family label (substituted) or a parameter (numeric value).
    #[arg(long = "set", value_name = "NAME=VALUE", global = true, allow_hyphen_values = true)]
    set: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct Input {
    /// Problem file (TOML, or JSON output of an earlier run).
    file: Option<PathBuf>,
    #[arg(short = 'L', long, allow_hyphen_values = true)]
    lagrangian: Option<String>,
    /// Dependent variables, comma separated.
    #[arg(short = 'x', long = "vars", value_delimiter = ',')]
    variables: Vec<String>,
    /// Parameters, comma separated.
    #[arg(short = 'p', long = "params", value_delimiter = ',')]
    parameters: Vec<String>,
    /// Name of the independent variable (continuous problems).
    #[arg(short = 't', long)]
    time: Option<String>,
    /// Name of the index (discrete problems).
    #[arg(short = 'k', long)]
    index: Option<String>,
    #[arg(long)]
    order: Option<u32>,
}

#[derive(Args, Debug, Default)]
struct GenArgs {
    /// Generator document: a file, or `-` for stdin.
    #[arg(long, value_name = "FILE")]
    generators: Option<String>,
    /// One generator component, `T=expr` or `VAR=expr` (repeatable).
    #[arg(long = "generator", value_name = "NAME=EXPR", allow_hyphen_values = true)]
    generator: Vec<String>,
}

#[derive(Args, Debug, Default)]
struct NumericArgs {
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Initial data, variable by variable: x, x', ..., x^(2m-1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    state: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Euler-Lagrange equations.
    El(Input),
    /// Variational symmetry generators within the ansatz.
    Symmetries {
        #[command(flatten)]
        input: Input,
        /// Exit 0 even when no generator is found.
        #[arg(long)]
        empty_ok: bool,
    },
    /// Conservation law of a generator.
    Noether {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        gens: GenArgs,
    },
    /// Check that a law is constant along extremals.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        gens: GenArgs,
        /// Law to check, instead of one built from a generator.
        #[arg(long, allow_hyphen_values = true)]
        law: Option<String>,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Discrete Euler-Lagrange equations.
    DiscreteEl(Input),
    /// Invariance generators of a discrete Lagrangian.
    DiscreteSymmetries {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        empty_ok: bool,
    },
    /// Discrete conservation law of a generator.
    DiscreteNoether {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        gens: GenArgs,
    },
    /// Roll the discrete recurrence and measure how far the law moves.
    DiscreteVerify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        gens: GenArgs,
        #[arg(long, allow_hyphen_values = true)]
        law: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::El(_) => "el",
            Cmd::Symmetries { .. } => "symmetries",
            Cmd::Noether { .. } => "noether",
            Cmd::Verify { .. } => "verify",
            Cmd::DiscreteEl(_) => "discrete-el",
            Cmd::DiscreteSymmetries { .. } => "discrete-symmetries",
            Cmd::DiscreteNoether { .. } => "discrete-noether",
            Cmd::DiscreteVerify { .. } => "discrete-verify",
        }
    }

    fn is_discrete(&self) -> bool {
        self.name().starts_with("discrete")
    }
}

fn read_source(src: &str) -> Result<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(src).map_err(|e| CliError::Io(format!("{src}: {e}")))
    }
}

/// `--generator` wins over `--generators`; the document may also carry the
/// problem.
fn generator_input(gens: &GenArgs) -> Result<(Option<GenInput>, Option<ProblemFile>)> {
    let (mut input, problem) = match &gens.generators {
        Some(src) => {
            let (g, p) = read_generators(&read_source(src)?, src)?;
            (Some(g), p)
        }
        None => (None, None),
    };
    if !gens.generator.is_empty() {
        let mut named = BTreeMap::new();
        for a in &gens.generator {
            let (k, v) = split_assignment(a)?;
            named.insert(k, parse(&v)?);
        }
        input = Some(GenInput::Named(named));
    }
    Ok((input, problem))
}

fn flag_layer(cli: &Cli, input: &Input) -> Result<ProblemFile> {
    let mut set = BTreeMap::new();
    for a in &cli.set {
        let (k, v) = split_assignment(a)?;
        set.insert(k, ValueText::Text(v));
    }
    Ok(ProblemFile {
        lagrangian: input.lagrangian.clone(),
        variables: input.variables.clone(),
        parameters: input.parameters.clone(),
        time: input.time.clone(),
        index: input.index.clone(),
        order: input.order,
        ansatz: AnsatzFile {
            degree: cli.ansatz_degree,
            atoms: (!cli.ansatz_atom.is_empty()).then(|| cli.ansatz_atom.clone()),
        },
        set,
        ..ProblemFile::default()
    })
}

fn execute(cli: &Cli) -> Result<(Report, Problem)> {
    let empty = GenArgs::default();
    let (input, gens, empty_ok) = match &cli.cmd {
        Cmd::El(i) | Cmd::DiscreteEl(i) => (i, &empty, false),
        Cmd::Symmetries { input, empty_ok } | Cmd::DiscreteSymmetries { input, empty_ok } => (input, &empty, *empty_ok),
        Cmd::Noether { input, gens }
        | Cmd::DiscreteNoether { input, gens }
        | Cmd::Verify { input, gens, .. }
        | Cmd::DiscreteVerify { input, gens, .. } => (input, gens, false),
    };
    let (generator, carried) = generator_input(gens)?;
    let mut file = carried.unwrap_or_default();
    let from_file = input.file.is_some();
    if let Some(path) = &input.file {
        file = file.merge(ProblemFile::load(path)?);
    }
    let mut flags = flag_layer(cli, input)?;
    let mut numeric_requested = false;
    let mut law = None;
    match &cli.cmd {
        Cmd::Verify { numeric, tol, law: l, .. } => {
            numeric_requested = numeric.t0.is_some() || numeric.horizon.is_some() || !numeric.state.is_empty();
            if numeric_requested || tol.is_some() {
                flags.numeric = Some(NumericFile {
                    t0: numeric.t0,
                    horizon: numeric.horizon,
                    state: (!numeric.state.is_empty()).then(|| numeric.state.clone()),
                    tol: *tol,
                });
            }
            law = l.clone();
        }
        Cmd::DiscreteVerify { steps, trials, tol, law: l, .. } => {
            flags.discrete = DiscreteFile { steps: *steps, trials: *trials, tol: *tol };
            law = l.clone();
        }
        _ => {}
    }
    if cli.cmd.is_discrete() && !from_file && file.lagrangian.is_none() {
        flags.kind = Kind::Discrete;
    }
    let problem = Problem::new(file.merge(flags))?;
    let run = Run {
        out: Out { format: cli.format, precision: cli.precision.max(1) },
        seed: cli.seed,
        problem,
        generator,
        law: law.map(|s| parse(&s)).transpose()?,
        empty_ok,
    };
    let report = match &cli.cmd {
        Cmd::El(_) => commands::el(&run),
        Cmd::Symmetries { .. } => commands::symmetries(&run),
        Cmd::Noether { .. } => commands::noether(&run),
        Cmd::Verify { .. } => commands::verify(&run, numeric_requested),
        Cmd::DiscreteEl(_) => commands::discrete_el(&run),
        Cmd::DiscreteSymmetries { .. } => commands::discrete_symmetries(&run),
        Cmd::DiscreteNoether { .. } => commands::discrete_noether_cmd(&run),
        Cmd::DiscreteVerify { .. } => commands::discrete_verify_cmd(&run),
    }?;
    Ok((report, run.problem))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((report, problem)) => {
            // a closed pipe downstream is not our failure
            let mut stdout = std::io::stdout().lock();
            if cli.format == Format::Json {
                let mut doc = json!({"schema": SCHEMA, "command": cli.cmd.name(), "problem": problem.to_json()});
                if let (Some(doc), Some(body)) = (doc.as_object_mut(), report.body.as_object()) {
                    doc.extend(body.clone());
                }
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
            } else {
                for line in &report.lines {
                    let _ = writeln!(stdout, "{line}");
                }
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
