//! The `vmtkit` command line.
//!
//! Exit codes: 0 success (or no counterexample up to the bound), 1
//! counterexample found, 2 invalid input or usage, 3 solver or environment
//! failure, 4 unknown result.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use vmtkit_core::bmc::{bmc_invariant, bmc_lasso_live, BmcError, BmcOutcome, BmcProblem, SolverError};
use vmtkit_core::convert::{btor_to_vmt, vmt_to_btor, vmt_to_horn, vmt_to_nuxmv, ConvertError};
use vmtkit_core::ltl::{ltl_to_vmt, parse_ltl, LtlError};
use vmtkit_core::model::{parse_vmt, print_vmt, validate, ModelError, Diagnostic, PropertyKind, PropertySpec, Severity, VmtDocument};
use vmtkit_core::oracle::{check_invariant_explicit, check_live_explicit, DomainBounds, InvariantResult, OracleError};
use vmtkit_core::Pos;

use crate::report;
use crate::solver::resolve_solver;

pub const EXIT_OK: u8 = 0;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_UNKNOWN: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "vmtkit", version, about = "Tools for VMT-LIB transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Parse and validate a VMT-LIB file, printing every diagnostic.
    Check(Input),
    /// Print a VMT-LIB file in normalized form.
    Print(InputOutput),
    /// Bounded model checking of an invariant property.
    Bmc(Verify),
    /// Bounded search for a lasso violating a live property.
    Live(Verify),
    /// Explicit-state check over finite variable domains.
    Sim(Sim),
    /// Constrained Horn clauses for one invariant property.
    ToHorn(Convert),
    /// BTOR2 model of the invariant properties.
    ToBtor(Convert),
    /// VMT-LIB document from a BTOR2 model.
    FromBtor(InputOutput),
    /// nuXmv module.
    ToNuxmv(InputOutput),
    /// Add a live property equivalent to an LTL formula.
    LtlCompile(LtlCompile),
}

#[derive(Debug, Args)]
struct Input {
    /// Input file; `-` or nothing reads standard input.
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputOutput {
    #[command(flatten)]
    input: Input,
    /// Output file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Verify {
    #[command(flatten)]
    input: Input,
    /// Property index; defaults to the lowest one of the right kind.
    #[arg(short, long)]
    property: Option<u64>,
    /// Largest unrolling depth.
    #[arg(short = 'k', long, default_value_t = 10)]
    bound: usize,
    /// Solver command line, e.g. `z3 -in`; `builtin` selects the bundled
    /// Boolean/bit-vector solver.
    #[arg(long)]
    solver_cmd: Option<String>,
}

#[derive(Debug, Args)]
struct Sim {
    #[command(flatten)]
    input: Input,
    /// Property index; defaults to the lowest invariant, then the lowest live property.
    #[arg(short, long)]
    property: Option<u64>,
    /// Range `lo:hi` given to every Int variable.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    int_bounds: Option<(i128, i128)>,
    /// Maximum path length for invariants; unlimited by default.
    #[arg(short = 'k', long)]
    bound: Option<usize>,
}

#[derive(Debug, Args)]
struct Convert {
    #[command(flatten)]
    io: InputOutput,
    /// Property to convert; `to-horn` defaults to the lowest invariant,
    /// `to-btor` to all of them.
    #[arg(short, long)]
    property: Option<u64>,
}

#[derive(Debug, Args)]
struct LtlCompile {
    #[command(flatten)]
    io: InputOutput,
    /// The LTL formula.
    #[arg(short, long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    /// File holding the LTL formula.
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// Index of the new live property; defaults to one above the largest.
    #[arg(long)]
    index: Option<u64>,
}

fn parse_range(s: &str) -> Result<(i128, i128), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: i128 = lo.trim().parse().map_err(|_| format!("invalid lower bound `{}`", lo))?;
    let hi: i128 = hi.trim().parse().map_err(|_| format!("invalid upper bound `{}`", hi))?;
    if lo > hi {
        return Err(format!("empty range {}:{}", lo, hi));
    }
    Ok((lo, hi))
}

/// An error report plus the exit code it maps to.
struct Failure {
    code: u8,
    text: String,
}

type Outcome = Result<(u8, String), Failure>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    name: String,
}

impl Ctx<'_> {
    fn fail(&self, code: u8, pos: Option<Pos>, kind: &str, message: impl std::fmt::Display) -> Failure {
        let pos = pos.unwrap_or(Pos::new(1, 1));
        Failure { code, text: format!("{}:{}: error[{}]: {}\n", self.name, pos, kind, message) }
    }

    fn read(&mut self, input: &Input) -> Result<String, Failure> {
        match &input.file {
            Some(p) if p.as_os_str() != "-" => {
                self.name = p.display().to_string();
                fs::read_to_string(p).map_err(|e| self.fail(EXIT_INPUT, None, "Io", e))
            }
            _ => {
                self.name = "<stdin>".to_string();
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).map_err(|e| self.fail(EXIT_INPUT, None, "Io", e))?;
                Ok(s)
            }
        }
    }

    fn model_error(&self, e: &ModelError) -> Failure {
        let msg = strip_pos(&e.to_string(), e.pos());
        self.fail(EXIT_INPUT, e.pos(), e.code(), msg)
    }

    /// Parses and validates; warnings are not reported here.
    fn document(&mut self, input: &Input) -> Result<VmtDocument, Failure> {
        let text = self.read(input)?;
        let doc = parse_vmt(&text).map_err(|e| self.model_error(&e))?;
        let errors: String = validate(&doc)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| diagnostic_line(&self.name, &d))
            .collect();
        if !errors.is_empty() {
            return Err(Failure { code: EXIT_INPUT, text: errors });
        }
        Ok(doc)
    }

    fn property<'d>(&self, doc: &'d VmtDocument, idx: Option<u64>, kind: PropertyKind) -> Result<&'d PropertySpec, Failure> {
        let found = match idx {
            Some(i) => doc.property(i),
            None => doc.properties.iter().filter(|p| p.kind == kind).min_by_key(|p| p.index),
        };
        let p = match (found, idx) {
            (Some(p), _) => p,
            (None, Some(i)) => return Err(self.fail(EXIT_INPUT, None, "NoSuchProperty", format!("no property with index {}", i))),
            (None, None) => {
                return Err(self.fail(EXIT_INPUT, None, "NoSuchProperty", format!("the document has no {}", describe(kind))))
            }
        };
        if p.kind != kind {
            let pos = doc.sources.properties.get(&p.index).copied();
            return Err(self.fail(
                EXIT_INPUT,
                pos,
                "WrongPropertyKind",
                format!("property {} is {}, expected {}", p.index, describe(p.kind), describe(kind)),
            ));
        }
        Ok(p)
    }

    fn bmc_error(&self, e: BmcError) -> Failure {
        match e {
            BmcError::Solver(s) => self.solver_error(s),
            BmcError::QuantifiedSystem => self.fail(EXIT_INPUT, None, "QuantifiedSystem", e),
            BmcError::WrongPropertyKind { .. } => self.fail(EXIT_INPUT, None, "WrongPropertyKind", e),
        }
    }

    fn solver_error(&self, e: SolverError) -> Failure {
        let kind = match &e {
            SolverError::SolverNotFound(_) => "SolverNotFound",
            SolverError::SolverFailed { .. } => "SolverFailed",
            SolverError::ParseModelError { .. } => "ParseModelError",
            SolverError::Unsupported(_) => "SolverUnsupported",
            SolverError::Io(_) => "SolverIo",
        };
        self.fail(EXIT_SOLVER, None, kind, e)
    }

    fn convert_error(&self, doc: Option<&VmtDocument>, e: ConvertError) -> Failure {
        let pos = match (&e, doc) {
            (ConvertError::LivePropertyUnsupported(i), Some(d)) => d.sources.properties.get(i).copied(),
            (ConvertError::MalformedBtor { line, .. }, _) => Some(Pos::new(*line as u32, 1)),
            _ => None,
        };
        let msg = match &e {
            ConvertError::MalformedBtor { reason, .. } => reason.clone(),
            _ => e.to_string(),
        };
        self.fail(EXIT_INPUT, pos, e.code(), msg)
    }
}

fn describe(kind: PropertyKind) -> &'static str {
    match kind {
        PropertyKind::Invariant => "an invariant property",
        PropertyKind::Live => "a live property",
    }
}

fn diagnostic_line(file: &str, d: &Diagnostic) -> String {
    match d.pos {
        Some(_) => format!("{}:{}\n", file, d),
        None => format!("{}:{}: {}\n", file, Pos::new(1, 1), d),
    }
}

/// Removes the leading `line:col: ` that positioned errors carry in their
/// own message.
fn strip_pos(msg: &str, pos: Option<Pos>) -> String {
    match pos {
        Some(p) => msg.strip_prefix(&format!("{}: ", p)).unwrap_or(msg).to_string(),
        None => msg.to_string(),
    }
}

fn write_output(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text).map_err(|e| format!("{}: {}", p.display(), e)),
        _ => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut cx = Ctx { stdin, name: "<stdin>".to_string() };
    let result = dispatch(cli.command, &mut cx, stdout);
    match result {
        Ok((code, text)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = stderr.write_all(f.text.as_bytes());
            f.code
        }
    }
}

fn dispatch(cmd: Cmd, cx: &mut Ctx<'_>, stdout: &mut dyn Write) -> Outcome {
    match cmd {
        Cmd::Check(input) => check(cx, &input),
        Cmd::Print(io) => {
            let doc = cx.document(&io.input)?;
            emit(cx, &io.output, print_vmt(&doc), stdout)
        }
        Cmd::Bmc(v) => bmc(cx, &v),
        Cmd::Live(v) => live(cx, &v),
        Cmd::Sim(s) => sim(cx, &s),
        Cmd::ToHorn(c) => {
            let doc = cx.document(&c.io.input)?;
            let p = cx.property(&doc, c.property, PropertyKind::Invariant).map_err(|f| {
                // A live property named explicitly is reported as such.
                match c.property.and_then(|i| doc.property(i)) {
                    Some(p) if p.kind == PropertyKind::Live => {
                        cx.convert_error(Some(&doc), ConvertError::LivePropertyUnsupported(p.index))
                    }
                    _ => f,
                }
            })?;
            let text = vmt_to_horn(&doc, p.index).map_err(|e| cx.convert_error(Some(&doc), e))?;
            emit(cx, &c.io.output, text, stdout)
        }
        Cmd::ToBtor(c) => {
            let mut doc = cx.document(&c.io.input)?;
            if let Some(i) = c.property {
                if doc.property(i).is_none() {
                    return Err(cx.convert_error(Some(&doc), ConvertError::NoSuchProperty(i)));
                }
                doc.properties.retain(|p| p.index == i);
            }
            let text = vmt_to_btor(&doc).map_err(|e| cx.convert_error(Some(&doc), e))?;
            emit(cx, &c.io.output, text, stdout)
        }
        Cmd::FromBtor(io) => {
            let text = cx.read(&io.input)?;
            let doc = btor_to_vmt(&text).map_err(|e| cx.convert_error(None, e))?;
            emit(cx, &io.output, print_vmt(&doc), stdout)
        }
        Cmd::ToNuxmv(io) => {
            let doc = cx.document(&io.input)?;
            let text = vmt_to_nuxmv(&doc).map_err(|e| cx.convert_error(Some(&doc), e))?;
            emit(cx, &io.output, text, stdout)
        }
        Cmd::LtlCompile(l) => ltl_compile(cx, &l, stdout),
    }
}

fn emit(cx: &Ctx<'_>, path: &Option<PathBuf>, text: String, stdout: &mut dyn Write) -> Outcome {
    write_output(path, &text, stdout).map_err(|e| cx.fail(EXIT_SOLVER, None, "Io", e))?;
    Ok((EXIT_OK, String::new()))
}

fn check(cx: &mut Ctx<'_>, input: &Input) -> Outcome {
    let text = cx.read(input)?;
    let doc = match parse_vmt(&text) {
        Ok(d) => d,
        // Parse errors are diagnostics too; `check` prints them on stdout.
        Err(e) => return Ok((EXIT_INPUT, cx.model_error(&e).text)),
    };
    let diags = validate(&doc);
    let text: String = diags.iter().map(|d| diagnostic_line(&cx.name, d)).collect();
    let code = if diags.iter().any(|d| d.severity == Severity::Error) { EXIT_INPUT } else { EXIT_OK };
    Ok((code, text))
}

fn bmc(cx: &mut Ctx<'_>, v: &Verify) -> Outcome {
    let doc = cx.document(&v.input)?;
    let p = cx.property(&doc, v.property, PropertyKind::Invariant)?;
    let mut solver = resolve_solver(v.solver_cmd.as_deref());
    let problem = BmcProblem::new(&doc);
    let outcome = bmc_invariant(&problem, p, v.bound, solver.as_mut()).map_err(|e| cx.bmc_error(e))?;
    let head = format!("property: {}\n", p.index);
    Ok(match outcome {
        BmcOutcome::Counterexample { bound, trace } => (
            EXIT_COUNTEREXAMPLE,
            format!("{}result: counterexample\nbound: {}\n{}", head, bound, report::trace(&doc.system, &trace)),
        ),
        BmcOutcome::NoCounterexample { bound } => {
            (EXIT_OK, format!("{}result: no counterexample up to {}\n", head, bound))
        }
        BmcOutcome::Unknown { bound } => (EXIT_UNKNOWN, format!("{}result: unknown at bound {}\n", head, bound)),
    })
}

fn live(cx: &mut Ctx<'_>, v: &Verify) -> Outcome {
    let doc = cx.document(&v.input)?;
    let p = cx.property(&doc, v.property, PropertyKind::Live)?;
    let mut solver = resolve_solver(v.solver_cmd.as_deref());
    let problem = BmcProblem::new(&doc);
    let outcome = bmc_lasso_live(&problem, p, v.bound, solver.as_mut()).map_err(|e| cx.bmc_error(e))?;
    let head = format!("property: {}\n", p.index);
    Ok(match outcome {
        BmcOutcome::Counterexample { bound, trace } => (
            EXIT_COUNTEREXAMPLE,
            format!("{}result: counterexample\nbound: {}\n{}", head, bound, report::lasso_trace(&doc.system, &trace)),
        ),
        BmcOutcome::NoCounterexample { bound } => {
            (EXIT_OK, format!("{}result: no counterexample up to {}\n", head, bound))
        }
        BmcOutcome::Unknown { bound } => (EXIT_UNKNOWN, format!("{}result: unknown at bound {}\n", head, bound)),
    })
}

fn sim(cx: &mut Ctx<'_>, s: &Sim) -> Outcome {
    let doc = cx.document(&s.input)?;
    // Either kind is accepted; without `--property` invariants come first.
    let kind = match s.property.and_then(|i| doc.property(i)) {
        Some(p) => p.kind,
        None if s.property.is_none() && !doc.properties.iter().any(|p| p.kind == PropertyKind::Invariant) => PropertyKind::Live,
        None => PropertyKind::Invariant,
    };
    let p = cx.property(&doc, s.property, kind)?;
    let mut bounds = DomainBounds::default();
    if let Some((lo, hi)) = s.int_bounds {
        bounds = DomainBounds::with_default_int(lo, hi).map_err(|e| oracle_failure(cx, e))?;
    }
    let head = format!("property: {}\n", p.index);
    match p.kind {
        PropertyKind::Invariant => {
            let r = check_invariant_explicit(&doc.system, p, &bounds, s.bound.unwrap_or(usize::MAX))
                .map_err(|e| oracle_failure(cx, e))?;
            Ok(match r {
                InvariantResult::Counterexample(path) => (
                    EXIT_COUNTEREXAMPLE,
                    format!("{}result: counterexample\nbound: {}\n{}", head, path.states.len() - 1, report::path(&doc.system, &path)),
                ),
                InvariantResult::NoCounterexample { exhausted: true } => {
                    (EXIT_OK, format!("{}result: holds on every reachable state\n", head))
                }
                InvariantResult::NoCounterexample { exhausted: false } => (
                    EXIT_OK,
                    format!("{}result: no counterexample up to {}\n", head, s.bound.unwrap_or(usize::MAX)),
                ),
            })
        }
        PropertyKind::Live => {
            let r = check_live_explicit(&doc.system, p, &bounds).map_err(|e| oracle_failure(cx, e))?;
            Ok(match r {
                Some(l) => (
                    EXIT_COUNTEREXAMPLE,
                    format!("{}result: counterexample\nbound: {}\n{}", head, l.states.len(), report::lasso(&doc.system, &l)),
                ),
                None => (EXIT_OK, format!("{}result: holds on every path\n", head)),
            })
        }
    }
}

fn oracle_failure(cx: &Ctx<'_>, e: OracleError) -> Failure {
    let (code, kind) = match &e {
        OracleError::UnsupportedForOracle(_) => (EXIT_INPUT, "UnsupportedForOracle"),
        OracleError::InvalidBound { .. } => (EXIT_INPUT, "InvalidBound"),
        OracleError::Unassigned(_) => (EXIT_INPUT, "Unassigned"),
        OracleError::WrongPropertyKind { .. } => (EXIT_INPUT, "WrongPropertyKind"),
        OracleError::DomainOverflow(_) => (EXIT_UNKNOWN, "DomainOverflow"),
        OracleError::TooManyStates(_) => (EXIT_UNKNOWN, "TooManyStates"),
    };
    cx.fail(code, None, kind, e)
}

fn ltl_compile(cx: &mut Ctx<'_>, l: &LtlCompile, stdout: &mut dyn Write) -> Outcome {
    let doc = cx.document(&l.io.input)?;
    let formula = match (&l.formula, &l.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => fs::read_to_string(p).map_err(|e| cx.fail(EXIT_INPUT, None, "Io", format!("{}: {}", p.display(), e)))?,
        (None, None) => return Err(cx.fail(EXIT_INPUT, None, "Usage", "no formula given")),
    };
    let ltl_failure = |e: LtlError| {
        let pos = match &e {
            LtlError::Syntax { pos, .. } => Some(*pos),
            LtlError::Frontend(f) => Some(f.pos()),
            _ => None,
        };
        let msg = strip_pos(&e.to_string(), pos);
        Failure { code: EXIT_INPUT, text: format!("<formula>:{}: error[{}]: {}\n", pos.unwrap_or(Pos::new(1, 1)), e.code(), msg) }
    };
    let phi = parse_ltl(formula.trim_end(), &doc).map_err(ltl_failure)?;
    let index = l.index.unwrap_or_else(|| doc.properties.iter().map(|p| p.index + 1).max().unwrap_or(0));
    let product = ltl_to_vmt(&doc, &phi, index).map_err(ltl_failure)?;
    emit(cx, &l.io.output, print_vmt(&product), stdout)
}
