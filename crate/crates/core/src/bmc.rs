//! Bounded model checking by unrolling the transition relation.
//!
//! Each frame gets its own copy of the state and input variables, named
//! `<base>@<frame>` where `@` inside the base is doubled. Declared functions
//! are rigid: one copy shared by all frames.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::elab::{elaborate_term, SortDecl, SymbolTable};
use crate::model::{PropertyKind, PropertySpec, TransitionSystem, VmtDocument};
use crate::oracle::{FinitePath, Lasso};
use crate::sexpr::{parse_sexprs, quote_symbol, Pos, SExpr, SExprKind};
use crate::sort::Sort;
use crate::term::{Op, Term};
use crate::value::Value;

/// Doubles every `@` so that timed names stay unambiguous.
pub fn escape_base(name: &str) -> String {
    name.replace('@', "@@")
}

/// Name of the copy of `base` at `frame`.
pub fn timed_name(base: &str, frame: usize) -> String {
    format!("{}@{}", escape_base(base), frame)
}

/// Inverse of [`timed_name`].
pub fn parse_timed_name(name: &str) -> Option<(String, usize)> {
    let bytes = name.as_bytes();
    let mut base = String::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'@' {
            if bytes.get(i + 1) == Some(&b'@') {
                base.push('@');
                i += 2;
                continue;
            }
            let digits = &name[i + 1..];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            if digits.len() > 1 && digits.starts_with('0') {
                return None;
            }
            return Some((base, digits.parse().ok()?));
        }
        let ch = name[i..].chars().next()?;
        base.push(ch);
        i += ch.len_utf8();
    }
    None
}

/// Name of the auxiliary loop selector for loop start `l`. It contains two
/// unpaired `@`, so it never clashes with a timed or escaped name.
fn loop_selector(l: usize) -> String {
    format!("loop@sel@{}", l)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("solver command `{0}` not found")]
    SolverNotFound(String),
    #[error("solver failed ({status}): {transcript}")]
    SolverFailed { status: String, transcript: String },
    #[error("cannot parse solver output: {line}")]
    ParseModelError { line: String },
    #[error("the built-in solver does not support {0}")]
    Unsupported(String),
    #[error("solver I/O error: {0}")]
    Io(String),
}

/// One satisfiability query: declarations, assertions and the symbols whose
/// values are wanted when the answer is `sat`.
#[derive(Debug, Clone, Default)]
pub struct Query {
    pub logic: Option<String>,
    pub sorts: Vec<SortDecl>,
    pub declarations: Vec<(String, Vec<Sort>, Sort)>,
    pub assertions: Vec<Term>,
    pub values: Vec<String>,
}

impl Query {
    /// Solver input text in the standard command language.
    pub fn to_smtlib(&self) -> String {
        let mut out = String::new();
        out.push_str("(set-option :produce-models true)\n");
        if let Some(l) = &self.logic {
            out.push_str(&format!("(set-logic {})\n", quote_symbol(l)));
        }
        for s in &self.sorts {
            out.push_str(&format!("{}\n", s.to_command()));
        }
        for (n, args, r) in &self.declarations {
            out.push_str(&format!(
                "{}\n",
                crate::script::CommandKind::DeclareFun(n.clone(), args.clone(), r.clone())
            ));
        }
        for a in &self.assertions {
            out.push_str(&format!("(assert {})\n", a));
        }
        out.push_str("(check-sat)\n");
        if !self.values.is_empty() {
            out.push_str("(get-value (");
            for (i, v) in self.values.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&quote_symbol(v));
            }
            out.push_str("))\n");
        }
        out.push_str("(exit)\n");
        out
    }

    pub fn sort_of(&self, name: &str) -> Option<&Sort> {
        self.declarations
            .iter()
            .find(|(n, args, _)| n == name && args.is_empty())
            .map(|(_, _, s)| s)
    }
}

/// Values reported by the solver, as ground terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub values: BTreeMap<String, Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Sat(Model),
    Unsat,
    Unknown,
}

pub trait Solver {
    fn check(&mut self, query: &Query) -> Result<CheckResult, SolverError>;
}

fn bad_output(line: impl Into<String>) -> SolverError {
    SolverError::ParseModelError { line: line.into() }
}

/// Turns a solver's model value into a ground term, normalizing literals.
fn value_term(e: &SExpr, sort: &Sort, symtab: &SymbolTable) -> Result<Term, SolverError> {
    if let Sort::Uninterpreted(..) = sort {
        // Abstract values such as `U!val!0` are kept as opaque symbols.
        if let Some(sym) = e.as_symbol() {
            return Ok(Term::Var(sym.to_string(), sort.clone()));
        }
    }
    let t = elaborate_term(e, symtab, &[]).map_err(|_| bad_output(format!("{}", e)))?;
    if t.sort() != *sort {
        return Err(bad_output(format!("value {} does not have sort {}", e, sort)));
    }
    Ok(match Value::from_term(&t) {
        Ok(v) => v.to_term(sort),
        Err(_) => t,
    })
}

/// Parses what a solver printed in response to [`Query::to_smtlib`].
pub fn parse_solver_output(text: &str, query: &Query) -> Result<CheckResult, SolverError> {
    let first_line = || text.lines().next().unwrap_or("").to_string();
    let exprs = parse_sexprs(text).map_err(|_| bad_output(first_line()))?;
    let mut items = exprs.iter().filter(|e| !is_success(e));
    let head = items.next().ok_or_else(|| bad_output("empty output"))?;
    if is_error_response(head) {
        return Err(SolverError::SolverFailed {
            status: "error response".to_string(),
            transcript: format!("{}", head),
        });
    }
    match head.as_symbol() {
        Some("unsat") => Ok(CheckResult::Unsat),
        Some("unknown") => Ok(CheckResult::Unknown),
        Some("sat") => {
            let mut model = Model::default();
            if query.values.is_empty() {
                return Ok(CheckResult::Sat(model));
            }
            let mut symtab = SymbolTable::new();
            for s in &query.sorts {
                let _ = symtab.declare_sort(s.clone(), Pos::default());
            }
            let bindings = items.next().ok_or_else(|| bad_output("missing get-value response"))?;
            let pairs = bindings
                .as_list()
                .ok_or_else(|| bad_output(format!("{}", bindings)))?;
            for pair in pairs {
                let (name, value) = match pair.as_list() {
                    Some([n, v]) => (n, v),
                    _ => return Err(bad_output(format!("{}", pair))),
                };
                let name = name.as_symbol().ok_or_else(|| bad_output(format!("{}", pair)))?;
                let sort = query.sort_of(name).ok_or_else(|| bad_output(format!("unexpected symbol {}", name)))?;
                model.values.insert(name.to_string(), value_term(value, sort, &symtab)?);
            }
            for v in &query.values {
                if !model.values.contains_key(v) {
                    return Err(bad_output(format!("no value for {}", v)));
                }
            }
            Ok(CheckResult::Sat(model))
        }
        _ => Err(bad_output(format!("{}", head))),
    }
}

fn is_success(e: &SExpr) -> bool {
    e.as_symbol() == Some("success")
}

/// Whether the output is an `(error ...)` response.
pub fn is_error_response(e: &SExpr) -> bool {
    matches!(&e.kind, SExprKind::List(items) if items.first().and_then(SExpr::as_symbol) == Some("error"))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BmcError {
    #[error("quantifiers in the system or property are not supported")]
    QuantifiedSystem,
    #[error("expected a {expected} property")]
    WrongPropertyKind { expected: &'static str },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `I@0 ∧ ⋀_{i<k} T@i` together with everything needed to query it.
#[derive(Debug, Clone)]
pub struct Unrolling {
    pub bound: usize,
    pub formula: Term,
    pub query: Query,
}

/// Everything of a document that BMC needs besides the property.
#[derive(Debug, Clone)]
pub struct BmcProblem<'a> {
    pub system: &'a TransitionSystem,
    pub functions: Vec<(String, Vec<Sort>, Sort)>,
    pub sorts: Vec<SortDecl>,
    pub logic: Option<String>,
}

impl<'a> BmcProblem<'a> {
    pub fn new(doc: &'a VmtDocument) -> Self {
        BmcProblem {
            system: &doc.system,
            functions: doc
                .functions
                .iter()
                .map(|f| (f.name.clone(), f.args.clone(), f.result.clone()))
                .collect(),
            sorts: doc
                .sorts
                .iter()
                .filter(|s| matches!(s, SortDecl::Declared { .. }))
                .cloned()
                .collect(),
            logic: doc.logic.clone(),
        }
    }

    pub fn from_system(system: &'a TransitionSystem) -> Self {
        BmcProblem {
            system,
            functions: Vec::new(),
            sorts: Vec::new(),
            logic: None,
        }
    }

    /// Copy of `t` at `frame`: current variables and inputs at `frame`,
    /// next variables at `frame + 1`.
    pub fn at_frame(&self, t: &Term, frame: usize) -> Term {
        let sys = self.system;
        let renamed = t.rename(&|n| {
            if sys.state_by_current(n).is_some() || sys.is_input(n) {
                Some(timed_name(n, frame))
            } else {
                sys.state_by_next(n).map(|s| timed_name(&s.current, frame + 1))
            }
        });
        if self.functions.is_empty() {
            renamed
        } else {
            renamed.map_ops(&|op| match op {
                Op::Uf(n) => Some(Op::Uf(escape_base(n))),
                _ => None,
            })
        }
    }

    pub fn unroll(&self, k: usize) -> Result<Unrolling, BmcError> {
        let sys = self.system;
        if sys.init.has_quantifier() || sys.trans.has_quantifier() {
            return Err(BmcError::QuantifiedSystem);
        }
        let mut parts = Vec::with_capacity(k + 1);
        parts.push(self.at_frame(&sys.init, 0));
        for i in 0..k {
            parts.push(self.at_frame(&sys.trans, i));
        }
        let formula = Term::and(parts);
        let mut query = Query {
            logic: self.logic.clone(),
            sorts: self.sorts.clone(),
            ..Default::default()
        };
        for (n, args, r) in &self.functions {
            query.declarations.push((escape_base(n), args.clone(), r.clone()));
        }
        for frame in 0..=k {
            for s in &sys.states {
                let name = timed_name(&s.current, frame);
                query.declarations.push((name.clone(), Vec::new(), s.sort.clone()));
                query.values.push(name);
            }
            if frame < k {
                for (n, sort) in &sys.inputs {
                    let name = timed_name(n, frame);
                    query.declarations.push((name.clone(), Vec::new(), sort.clone()));
                    query.values.push(name);
                }
            }
        }
        query.assertions.push(formula.clone());
        Ok(Unrolling {
            bound: k,
            formula,
            query,
        })
    }

    fn read_trace(&self, model: &Model, frames: usize, input_frames: usize) -> (Vec<Vec<Term>>, Vec<Vec<Term>>) {
        let sys = self.system;
        let get = |base: &str, f: usize| model.values[&timed_name(base, f)].clone();
        let states = (0..frames)
            .map(|f| sys.states.iter().map(|s| get(&s.current, f)).collect())
            .collect();
        let inputs = (0..input_frames)
            .map(|f| sys.inputs.iter().map(|(n, _)| get(n, f)).collect())
            .collect();
        (states, inputs)
    }
}

/// A finite counterexample: `states[i]` are the state values at frame `i`,
/// `inputs[i]` the inputs of the step out of frame `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<Vec<Term>>,
    pub inputs: Vec<Vec<Term>>,
}

/// A lasso counterexample; the step out of the last state leads back to
/// `states[loop_start]`, so `inputs` has one entry per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoTrace {
    pub states: Vec<Vec<Term>>,
    pub inputs: Vec<Vec<Term>>,
    pub loop_start: usize,
}

fn to_values(rows: &[Vec<Term>]) -> Option<Vec<Vec<Value>>> {
    rows.iter()
        .map(|r| r.iter().map(|t| Value::from_term(t).ok()).collect())
        .collect()
}

impl Trace {
    /// The trace as explicit values, if every value is finite-domain.
    pub fn to_path(&self) -> Option<FinitePath> {
        Some(FinitePath {
            states: to_values(&self.states)?,
            inputs: to_values(&self.inputs)?,
        })
    }
}

impl LassoTrace {
    pub fn to_lasso(&self) -> Option<Lasso> {
        Some(Lasso {
            states: to_values(&self.states)?,
            inputs: to_values(&self.inputs)?,
            loop_start: self.loop_start,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BmcOutcome<T> {
    /// A counterexample at the smallest bound admitting one.
    Counterexample { bound: usize, trace: T },
    /// No counterexample up to and including `bound`.
    NoCounterexample { bound: usize },
    /// The solver answered `unknown` at `bound`; smaller bounds were unsat.
    Unknown { bound: usize },
}

/// Looks for a path of length `k ≤ k_max` ending in a `¬p` state.
pub fn bmc_invariant(
    problem: &BmcProblem<'_>,
    p: &PropertySpec,
    k_max: usize,
    solver: &mut dyn Solver,
) -> Result<BmcOutcome<Trace>, BmcError> {
    if p.kind != PropertyKind::Invariant {
        return Err(BmcError::WrongPropertyKind { expected: "invariant" });
    }
    if p.formula.has_quantifier() {
        return Err(BmcError::QuantifiedSystem);
    }
    for k in 0..=k_max {
        let mut u = problem.unroll(k)?;
        u.query.assertions.push(Term::not(problem.at_frame(&p.formula, k)));
        match solver.check(&u.query)? {
            CheckResult::Unsat => {}
            CheckResult::Unknown => return Ok(BmcOutcome::Unknown { bound: k }),
            CheckResult::Sat(model) => {
                let (states, inputs) = problem.read_trace(&model, k + 1, k);
                return Ok(BmcOutcome::Counterexample {
                    bound: k,
                    trace: Trace { states, inputs },
                });
            }
        }
    }
    Ok(BmcOutcome::NoCounterexample { bound: k_max })
}

/// The lasso constraint at bound `k`: exactly one loop start `l < k`, the
/// state at `k` equals the state at `l`, and `p` fails somewhere in the loop.
pub fn lasso_constraint(problem: &BmcProblem<'_>, p: &Term, k: usize) -> (Vec<String>, Term) {
    let sys = problem.system;
    let sels: Vec<String> = (0..k).map(loop_selector).collect();
    let sel = |l: usize| Term::var(sels[l].clone(), Sort::Bool);
    let mut parts = Vec::new();
    parts.push(Term::or((0..k).map(sel)));
    for a in 0..k {
        for b in a + 1..k {
            parts.push(Term::or([Term::not(sel(a)), Term::not(sel(b))]));
        }
    }
    for l in 0..k {
        let closes = sys.states.iter().map(|s| {
            Term::eq(
                Term::var(timed_name(&s.current, k), s.sort.clone()),
                Term::var(timed_name(&s.current, l), s.sort.clone()),
            )
        });
        let fails = Term::or((l..k).map(|j| Term::not(problem.at_frame(p, j))));
        parts.push(Term::implies(sel(l), Term::and(closes.chain(core::iter::once(fails)))));
    }
    (sels, Term::and(parts))
}

/// Looks for a lasso-shaped path `s_0 .. s_k` with `s_k = s_l` and a `¬p`
/// state in the loop, for `1 ≤ k ≤ k_max`.
pub fn bmc_lasso_live(
    problem: &BmcProblem<'_>,
    p: &PropertySpec,
    k_max: usize,
    solver: &mut dyn Solver,
) -> Result<BmcOutcome<LassoTrace>, BmcError> {
    if p.kind != PropertyKind::Live {
        return Err(BmcError::WrongPropertyKind { expected: "live" });
    }
    if p.formula.has_quantifier() {
        return Err(BmcError::QuantifiedSystem);
    }
    for k in 1..=k_max {
        let mut u = problem.unroll(k)?;
        let (sels, constraint) = lasso_constraint(problem, &p.formula, k);
        for s in &sels {
            u.query.declarations.push((s.clone(), Vec::new(), Sort::Bool));
            u.query.values.push(s.clone());
        }
        u.query.assertions.push(constraint);
        match solver.check(&u.query)? {
            CheckResult::Unsat => {}
            CheckResult::Unknown => return Ok(BmcOutcome::Unknown { bound: k }),
            CheckResult::Sat(model) => {
                let loop_start = sels
                    .iter()
                    .position(|s| model.values.get(s).is_some_and(Term::is_true))
                    .ok_or_else(|| bad_output("no loop selector is true"))?;
                let (states, inputs) = problem.read_trace(&model, k, k);
                return Ok(BmcOutcome::Counterexample {
                    bound: k,
                    trace: LassoTrace {
                        states,
                        inputs,
                        loop_start,
                    },
                });
            }
        }
    }
    Ok(BmcOutcome::NoCounterexample { bound: k_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_vmt;
    use alloc::vec;

    const EXAMPLE: &str = "(declare-const x Int)(declare-const x.next Int)\n\
        (define-fun sv.x () Int (! x :next x.next))(declare-const b Bool)\n\
        (define-fun init () Bool (! (= x 1) :init))\n\
        (define-fun trans () Bool (! (= x.next (ite b (+ x 1) x)) :trans))\n\
        (define-fun p1 () Bool (! (> x 0) :invar-property 1))";

    #[test]
    fn timed_names_round_trip() {
        for (base, frame) in [("x", 0), ("a@b", 3), ("@", 12), ("x@0", 1)] {
            let t = timed_name(base, frame);
            assert_eq!(parse_timed_name(&t), Some((base.to_string(), frame)));
        }
        assert_ne!(timed_name("a@1", 2), timed_name("a", 12));
        assert_eq!(parse_timed_name(&loop_selector(0)), None);
        assert_eq!(parse_timed_name("plain"), None);
    }

    #[test]
    fn unrolling_of_example() {
        let doc = parse_vmt(EXAMPLE).unwrap();
        let pb = BmcProblem::new(&doc);
        assert_eq!(pb.unroll(0).unwrap().formula.to_string(), "(= x@0 1)");
        let u = pb.unroll(2).unwrap();
        assert_eq!(
            u.formula.to_string(),
            "(and (= x@0 1) (= x@1 (ite b@0 (+ x@0 1) x@0)) (= x@2 (ite b@1 (+ x@1 1) x@1)))"
        );
        assert_eq!(u.query.values, vec!["x@0", "b@0", "x@1", "b@1", "x@2"]);
    }

    #[test]
    fn trivial_relation_unrolls_to_init() {
        let doc = parse_vmt(
            "(declare-const v Bool)(declare-const w Bool)(define-fun s () Bool (! v :next w))\n\
             (define-fun i () Bool (! v :init))",
        )
        .unwrap();
        assert_eq!(BmcProblem::new(&doc).unroll(5).unwrap().formula.to_string(), "v@0");
    }

    #[test]
    fn parses_models() {
        let q = Query {
            declarations: vec![
                ("y".into(), vec![], Sort::Int),
                ("z".into(), vec![], Sort::BitVec(4)),
                ("a".into(), vec![], Sort::array(Sort::Int, Sort::Int)),
            ],
            values: vec!["y".into(), "z".into(), "a".into()],
            ..Default::default()
        };
        let out = "sat\n((y (- 3))\n (z #x5)\n (a ((as const (Array Int Int)) 0)))\n";
        match parse_solver_output(out, &q).unwrap() {
            CheckResult::Sat(m) => {
                assert_eq!(m.values["y"], Term::int(-3));
                assert_eq!(m.values["z"].to_string(), "#b0101");
                assert_eq!(m.values["a"].to_string(), "((as const (Array Int Int)) 0)");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_solver_output("unsat\n(error \"no model\")\n", &q).unwrap(), CheckResult::Unsat);
        assert_eq!(parse_solver_output("unknown\n", &q).unwrap(), CheckResult::Unknown);
        assert!(matches!(
            parse_solver_output("segfault\n", &q),
            Err(SolverError::ParseModelError { .. })
        ));
    }

    #[test]
    fn query_text() {
        let q = Query {
            logic: Some("QF_LIA".into()),
            declarations: vec![("y".into(), vec![], Sort::Int)],
            assertions: vec![Term::eq(Term::var("y", Sort::Int), Term::int(3))],
            values: vec!["y".into()],
            ..Default::default()
        };
        assert_eq!(
            q.to_smtlib(),
            "(set-option :produce-models true)\n(set-logic QF_LIA)\n(declare-fun y () Int)\n(assert (= y 3))\n(check-sat)\n(get-value (y))\n(exit)\n"
        );
    }
}
