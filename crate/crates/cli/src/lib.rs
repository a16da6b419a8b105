//! The `tddc` command line: compile, count, compare and classify QF_LRA
//! formulas given as SMT-LIB scripts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tddc_core::allsmt::DEFAULT_MAX_ASSIGNMENTS;
use tddc_core::smtlib::Script;
use tddc_core::{
    align_atoms, enumerate, parse_script, Atom, AtomMap, AtomOrder, CompileError, CompileOptions,
    CompileStats, Compiler, EnumConfig, EnumError, Mode, SatStatus, TFormula, Tdd,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_EQUIVALENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tddc",
    version,
    about = "Compile QF_LRA formulas into theory-canonical OBDDs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a formula and print its statistics as JSON.
    Compile { input: PathBuf },
    /// Print the number of consistent total assignments over the atoms.
    Count { input: PathBuf },
    /// Decide theory equivalence of two formulas.
    Equiv { left: PathBuf, right: PathBuf },
    /// Classify a formula as unsat, valid or sat.
    Check { input: PathBuf },
    /// Print the compiled diagram in Graphviz DOT format.
    Dot { input: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    EqElim,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Direct => Mode::Direct,
            ModeArg::EqElim => Mode::EqElim,
        }
    }
}

#[derive(Debug, Args)]
pub struct Options {
    /// Lemma generation mode.
    #[arg(long, value_enum, default_value = "direct", global = true)]
    pub mode: ModeArg,
    /// Comma-separated SMT-LIB atoms fixing the variable order.
    #[arg(long, global = true)]
    pub order: Option<String>,
    /// Write the DOT rendering of the diagram to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report timing with the statistics.
    #[arg(long, global = true)]
    pub stats: bool,
    /// Abort after exploring this many total assignments.
    #[arg(long, default_value_t = DEFAULT_MAX_ASSIGNMENTS, global = true)]
    pub max_assignments: u64,
    /// Print each theory conflict and its lemma to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Limit(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Limit(_) => EXIT_LIMIT,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        if e.is_resource_limit() {
            Failure::Limit(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        CompileError::from(e).into()
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Input(format!("write failed: {e}"))
}

#[derive(Serialize)]
struct CompileReport<'a> {
    #[serde(flatten)]
    stats: &'a CompileStats,
    status: SatStatus,
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

fn load(path: &Path) -> Result<Script, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_script(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

fn declared_order(spec: &str, script: &Script) -> Result<Vec<Atom>, Failure> {
    let mut atoms = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let term = script
            .declarations
            .parse_term(part)
            .map_err(|e| Failure::Input(format!("--order `{part}`: {e}")))?;
        let found = term.atoms();
        if found.is_empty() {
            return Err(Failure::Input(format!("--order `{part}` is not an atom")));
        }
        atoms.extend(found);
    }
    Ok(atoms)
}

fn compile_options(options: &Options, script: &Script) -> Result<CompileOptions, Failure> {
    let order = match &options.order {
        Some(spec) => AtomOrder::Declared(declared_order(spec, script)?),
        None => AtomOrder::FirstOccurrence,
    };
    Ok(CompileOptions {
        order,
        mode: options.mode.into(),
        max_assignments: options.max_assignments,
        trace: options.verbose,
        ..CompileOptions::default()
    })
}

fn write_trace(t: &Tdd, err: &mut dyn Write) -> Result<(), Failure> {
    for line in &t.trace {
        writeln!(err, "{line}").map_err(io_failure)?;
    }
    Ok(())
}

fn write_json(value: &impl Serialize, to: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(to, "{text}").map_err(io_failure)
}

fn report<'a>(t: &'a Tdd, mode: Mode, elapsed: Option<f64>) -> CompileReport<'a> {
    CompileReport {
        stats: &t.stats,
        status: t.status,
        mode,
        wall_time_ms: elapsed,
    }
}

fn compile_one(
    options: &Options,
    path: &Path,
    err: &mut dyn Write,
) -> Result<(Compiler, Tdd, f64), Failure> {
    let script = load(path)?;
    let opts = compile_options(options, &script)?;
    let mut compiler = Compiler::new();
    let start = Instant::now();
    let t = compiler.compile(&script.formula, &opts)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    write_trace(&t, err)?;
    Ok((compiler, t, elapsed))
}

fn write_dot(path: &Path, dot: &str) -> Result<(), Failure> {
    fs::write(path, dot).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn status_of(phi: &TFormula, options: &Options) -> Result<SatStatus, Failure> {
    let mut map = AtomMap::from_formula(phi);
    let config = EnumConfig {
        stop_at_first: true,
        max_assignments: options.max_assignments,
        ..EnumConfig::default()
    };
    Ok(enumerate(phi, &mut map, options.mode.into(), &config)?.status)
}

/// Runs one command; output goes to `out`, diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let options = &cli.options;
    let mode: Mode = options.mode.into();
    match &cli.command {
        Command::Compile { input } => {
            let (compiler, t, elapsed) = compile_one(options, input, err)?;
            write_json(&report(&t, mode, options.stats.then_some(elapsed)), out)?;
            if let Some(path) = &options.out {
                write_dot(path, &compiler.to_dot(&t))?;
            }
        }
        Command::Count { input } => {
            let (compiler, t, elapsed) = compile_one(options, input, err)?;
            writeln!(out, "{}", compiler.count_models(&t)).map_err(io_failure)?;
            if options.stats {
                write_json(&report(&t, mode, Some(elapsed)), err)?;
            }
        }
        Command::Dot { input } => {
            let (compiler, t, elapsed) = compile_one(options, input, err)?;
            let dot = compiler.to_dot(&t);
            match &options.out {
                Some(path) => write_dot(path, &dot)?,
                None => write!(out, "{dot}").map_err(io_failure)?,
            }
            if options.stats {
                write_json(&report(&t, mode, Some(elapsed)), err)?;
            }
        }
        Command::Equiv { left, right } => {
            let (a, b) = (load(left)?, load(right)?);
            let mut opts = match &options.order {
                Some(_) => compile_options(options, &a)?,
                None => CompileOptions {
                    mode,
                    max_assignments: options.max_assignments,
                    trace: options.verbose,
                    ..align_atoms(&a.formula, &b.formula)
                },
            };
            opts.mode = mode;
            let mut compiler = Compiler::new();
            let start = Instant::now();
            let ta = compiler.compile(&a.formula, &opts)?;
            let tb = compiler.compile(&b.formula, &opts)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            write_trace(&ta, err)?;
            write_trace(&tb, err)?;
            let same = ta.root == tb.root;
            writeln!(
                out,
                "{}",
                if same { "equivalent" } else { "not-equivalent" }
            )
            .map_err(io_failure)?;
            if options.stats {
                #[derive(Serialize)]
                struct Pair<'a> {
                    left: CompileReport<'a>,
                    right: CompileReport<'a>,
                    wall_time_ms: f64,
                }
                let pair = Pair {
                    left: report(&ta, mode, None),
                    right: report(&tb, mode, None),
                    wall_time_ms: elapsed,
                };
                write_json(&pair, err)?;
            }
            if !same {
                return Ok(EXIT_NOT_EQUIVALENT);
            }
        }
        Command::Check { input } => {
            let script = load(input)?;
            let phi = &script.formula;
            let verdict = if status_of(phi, options)? == SatStatus::Unsat {
                "unsat"
            } else if status_of(&TFormula::not(phi.clone()), options)? == SatStatus::Unsat {
                "valid"
            } else {
                "sat"
            };
            writeln!(out, "{verdict}").map_err(io_failure)?;
        }
    }
    Ok(EXIT_OK)
}
