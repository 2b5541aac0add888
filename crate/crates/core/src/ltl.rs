//! LTL properties compiled into live properties of a product system.
//!
//! The negated formula is put in negation normal form and turned into a
//! symbolic tableau with one fresh Boolean state variable per `X`-subformula
//! of its closure. The tableau's fairness conditions (one per `U`) are then
//! merged into a single one by a counter, so that the product has a fair
//! path exactly when the original system violates the formula.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::elab::{elaborate_term, expand_defines, SymbolTable};
use crate::error::FrontendError;
use crate::model::{fresh_name, PropertyKind, PropertySpec, StateVar, TransitionSystem, VmtDocument};
use crate::sexpr::{is_simple_symbol, parse_sexpr, quote_symbol, Pos};
use crate::sort::Sort;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl {
    Atom(Term),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn atom(t: Term) -> Ltl {
        Ltl::Atom(t)
    }

    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }

    pub fn finally(a: Ltl) -> Ltl {
        Ltl::Finally(Box::new(a))
    }

    pub fn globally(a: Ltl) -> Ltl {
        Ltl::Globally(Box::new(a))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    pub fn atoms(&self, out: &mut Vec<Term>) {
        match self {
            Ltl::Atom(t) => out.push(t.clone()),
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => a.atoms(out),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    /// True when negation is applied to atoms only and the formula uses no
    /// `->`, `F` or `G`.
    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::Atom(_) => true,
            Ltl::Not(a) => matches!(**a, Ltl::Atom(_)),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => a.is_nnf() && b.is_nnf(),
            Ltl::Next(a) => a.is_nnf(),
            Ltl::Implies(..) | Ltl::Finally(_) | Ltl::Globally(_) => false,
        }
    }

    /// Distinct `U`-subformulas.
    pub fn until_subformulas(&self) -> BTreeSet<Ltl> {
        let mut out = BTreeSet::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Ltl::Atom(_) => {}
                Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => stack.push(a),
                Ltl::Until(a, b) => {
                    out.insert(f.clone());
                    stack.push(a);
                    stack.push(b);
                }
                Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Release(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }
}

const KEYWORDS: &[&str] = &["X", "F", "G", "U", "R", "true", "false"];

fn is_operator_word(w: &str) -> bool {
    KEYWORDS.contains(&w) || (!w.is_empty() && w.chars().all(|c| matches!(c, 'X' | 'F' | 'G')))
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::Atom(Term::Var(n, _)) if is_operator_word(n) || !is_simple_symbol(n) => write!(f, "|{}|", n),
            Ltl::Atom(t) => write!(f, "{}", t),
            Ltl::Not(a) => write!(f, "!{}", a),
            Ltl::And(a, b) => write!(f, "({} & {})", a, b),
            Ltl::Or(a, b) => write!(f, "({} | {})", a, b),
            Ltl::Implies(a, b) => write!(f, "({} -> {})", a, b),
            Ltl::Next(a) => write!(f, "X {}", a),
            Ltl::Finally(a) => write!(f, "F {}", a),
            Ltl::Globally(a) => write!(f, "G {}", a),
            Ltl::Until(a, b) => write!(f, "({} U {})", a, b),
            Ltl::Release(a, b) => write!(f, "({} R {})", a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtlError {
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("atom `{0}` is not Boolean")]
    AtomNotBoolean(String),
    #[error("atom refers to the input `{0}`; LTL atoms may only use state variables")]
    AtomUsesInput(String),
    #[error("atom refers to the next-state variable `{0}`")]
    AtomUsesNextState(String),
    #[error("property index {0} is already in use")]
    IndexInUse(u64),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
}

impl LtlError {
    pub fn code(&self) -> &'static str {
        match self {
            LtlError::Syntax { .. } => "LtlSyntaxError",
            LtlError::AtomNotBoolean(_) => "AtomNotBoolean",
            LtlError::AtomUsesInput(_) => "AtomUsesInput",
            LtlError::AtomUsesNextState(_) => "AtomUsesNextState",
            LtlError::IndexInUse(_) => "IndexInUse",
            LtlError::Frontend(e) => e.code(),
        }
    }
}

/// Checks that an atom is a Boolean predicate over current-state variables.
pub fn check_atom(sys: &TransitionSystem, t: &Term) -> Result<(), LtlError> {
    if !t.sort().is_bool() {
        return Err(LtlError::AtomNotBoolean(format!("{}", t)));
    }
    for v in t.free_vars() {
        if sys.is_input(&v) {
            return Err(LtlError::AtomUsesInput(v));
        }
        if sys.state_by_next(&v).is_some() {
            return Err(LtlError::AtomUsesNextState(v));
        }
    }
    Ok(())
}

/// Reads an LTL formula whose atoms are Boolean SMT-LIB terms over the
/// document's state variables.
///
/// Operators: `!` (or `~`), `X`, `F`, `G`, `U`, `R`, `&`, `|`, `->`, with
/// `FG`-style runs of unary operators accepted as one word. Unary operators
/// bind tighter than `U`/`R`, which bind tighter than `&`, `|` and `->`.
/// `U`, `R` and `->` associate to the right. A parenthesized group that is
/// a well-sorted SMT-LIB term is read as an atom.
pub fn parse_ltl(text: &str, doc: &VmtDocument) -> Result<Ltl, LtlError> {
    let symtab = doc.symbol_table();
    let mut p = Parser { text, at: 0, doc, symtab: &symtab };
    let f = p.implication()?;
    p.skip_ws();
    if p.at < text.len() {
        return Err(p.error("unexpected text after the formula"));
    }
    Ok(f)
}

struct Parser<'a> {
    text: &'a str,
    at: usize,
    doc: &'a VmtDocument,
    symtab: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn pos_of(&self, at: usize) -> Pos {
        let before = &self.text[..at];
        let line = before.matches('\n').count() as u32 + 1;
        let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) as u32 + 1;
        Pos::new(line, col)
    }

    fn error(&self, message: &str) -> LtlError {
        LtlError::Syntax { pos: self.pos_of(self.at), message: message.to_string() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.at..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.at = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.at += tok.len();
            true
        } else {
            false
        }
    }

    /// The next bare word, without consuming it.
    fn peek_word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            if !is_word_char(c) || rest[i..].starts_with("->") {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            None
        } else {
            Some(&rest[..end])
        }
    }

    fn implication(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl, LtlError> {
        let mut acc = self.conjunction()?;
        loop {
            self.skip_ws();
            let rest = self.rest();
            let n = if rest.starts_with("||") {
                2
            } else if rest.starts_with('|') && !starts_quoted_symbol(rest) {
                1
            } else {
                break;
            };
            self.at += n;
            let rhs = self.conjunction()?;
            acc = Ltl::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Ltl, LtlError> {
        let mut acc = self.binary_temporal()?;
        while self.eat("&&") || self.eat("&") {
            let rhs = self.binary_temporal()?;
            acc = Ltl::and(acc, rhs);
        }
        Ok(acc)
    }

    fn binary_temporal(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.unary()?;
        match self.peek_word() {
            Some("U") => {
                self.at += 1;
                Ok(Ltl::until(lhs, self.binary_temporal()?))
            }
            Some("R") => {
                self.at += 1;
                Ok(Ltl::release(lhs, self.binary_temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Ltl, LtlError> {
        if self.eat("!") || self.eat("~") {
            return Ok(Ltl::not(self.unary()?));
        }
        if let Some(w) = self.peek_word() {
            let ops = w.to_string();
            let is_ops = !ops.is_empty()
                && ops.chars().all(|c| matches!(c, 'X' | 'F' | 'G'))
                && self.symtab.get(&ops).is_none();
            if is_ops {
                self.at += ops.len();
                let mut f = self.unary()?;
                for c in ops.chars().rev() {
                    f = match c {
                        'X' => Ltl::next(f),
                        'F' => Ltl::finally(f),
                        _ => Ltl::globally(f),
                    };
                }
                return Ok(f);
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl, LtlError> {
        self.skip_ws();
        let start = self.at;
        let rest = self.rest();
        if rest.starts_with('(') {
            let end = balanced_end(rest).ok_or_else(|| self.error("unbalanced parentheses"))?;
            let group = &rest[..end];
            let as_term = parse_sexpr(group).map_err(LtlError::from).and_then(|e| self.term(&e));
            match as_term {
                Ok(t) => {
                    self.at += end;
                    return Ok(Ltl::Atom(t));
                }
                Err(LtlError::Frontend(term_err)) => {
                    // Not a term: read the group as a parenthesized formula.
                    self.at += 1;
                    let inner = self.implication();
                    match inner {
                        Ok(f) if self.eat(")") => Ok(f),
                        Ok(_) if is_ltl_group(group) => Err(self.error("expected `)`")),
                        Err(e) if is_ltl_group(group) => Err(e),
                        _ => {
                            self.at = start;
                            Err(LtlError::Frontend(term_err))
                        }
                    }
                }
                Err(e) => Err(e),
            }
        } else if starts_quoted_symbol(rest) {
            let close = rest[1..].find('|').ok_or_else(|| self.error("unterminated quoted symbol"))? + 2;
            let name = &rest[1..close - 1];
            self.at += close;
            self.symbol_atom(name, start)
        } else {
            let Some(w) = self.peek_word() else {
                return Err(self.error("expected a formula"));
            };
            let w = w.to_string();
            if matches!(w.as_str(), "U" | "R") {
                return Err(self.error("expected a formula"));
            }
            self.at += w.len();
            self.symbol_atom(&w, start)
        }
    }

    fn symbol_atom(&mut self, name: &str, start: usize) -> Result<Ltl, LtlError> {
        match name {
            "true" => return Ok(Ltl::Atom(Term::tt())),
            "false" => return Ok(Ltl::Atom(Term::ff())),
            _ => {}
        }
        let mut e = crate::sexpr::SExpr::symbol(name);
        e.pos = self.pos_of(start);
        self.term(&e).map(Ltl::Atom)
    }

    fn term(&self, e: &crate::sexpr::SExpr) -> Result<Term, LtlError> {
        let t = elaborate_term(e, self.symtab, &[])?;
        let t = expand_defines(&t, self.symtab)?;
        check_atom(&self.doc.system, &t)?;
        Ok(t)
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || "@$%^*_-+=<>.?/'".contains(c)
}

fn starts_quoted_symbol(rest: &str) -> bool {
    let mut chars = rest.chars();
    chars.next() == Some('|') && matches!(chars.next(), Some(c) if !c.is_whitespace() && c != '|')
        && rest[1..].contains('|')
}

/// Whether a parenthesized group reads naturally as LTL rather than as a
/// (possibly ill-sorted) term, used to pick the more helpful error.
fn is_ltl_group(group: &str) -> bool {
    let inner = group[1..].trim_start();
    let head = inner.split(|c: char| c.is_whitespace() || c == '(' || c == ')').next().unwrap_or("");
    inner.starts_with('!') || inner.starts_with('~') || is_operator_word(head) || group.contains(" U ")
        || group.contains(" R ") || group.contains('&') || group.contains("->")
}

/// Length of the balanced parenthesized prefix of `s`, skipping quoted
/// symbols, strings and comments.
fn balanced_end(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut chars = s.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            '|' if starts_quoted_symbol(&s[i..]) => {
                for (_, d) in chars.by_ref() {
                    if d == '|' {
                        break;
                    }
                }
            }
            '"' => {
                for (_, d) in chars.by_ref() {
                    if d == '"' {
                        break;
                    }
                }
            }
            _ => {}
        }
    }
    None
}

/// Pushes negations to the atoms and rewrites `->`, `F` and `G` away.
pub fn nnf(f: &Ltl) -> Ltl {
    to_nnf(f, false)
}

fn to_nnf(f: &Ltl, negate: bool) -> Ltl {
    match (f, negate) {
        (Ltl::Atom(_), false) => f.clone(),
        (Ltl::Atom(_), true) => Ltl::not(f.clone()),
        (Ltl::Not(a), _) => to_nnf(a, !negate),
        (Ltl::And(a, b), false) => Ltl::and(to_nnf(a, false), to_nnf(b, false)),
        (Ltl::And(a, b), true) => Ltl::or(to_nnf(a, true), to_nnf(b, true)),
        (Ltl::Or(a, b), false) => Ltl::or(to_nnf(a, false), to_nnf(b, false)),
        (Ltl::Or(a, b), true) => Ltl::and(to_nnf(a, true), to_nnf(b, true)),
        (Ltl::Implies(a, b), false) => Ltl::or(to_nnf(a, true), to_nnf(b, false)),
        (Ltl::Implies(a, b), true) => Ltl::and(to_nnf(a, false), to_nnf(b, true)),
        (Ltl::Next(a), _) => Ltl::next(to_nnf(a, negate)),
        (Ltl::Finally(a), false) => Ltl::until(Ltl::Atom(Term::tt()), to_nnf(a, false)),
        (Ltl::Finally(a), true) => Ltl::release(Ltl::Atom(Term::ff()), to_nnf(a, true)),
        (Ltl::Globally(a), false) => Ltl::release(Ltl::Atom(Term::ff()), to_nnf(a, false)),
        (Ltl::Globally(a), true) => Ltl::until(Ltl::Atom(Term::tt()), to_nnf(a, true)),
        (Ltl::Until(a, b), false) => Ltl::until(to_nnf(a, false), to_nnf(b, false)),
        (Ltl::Until(a, b), true) => Ltl::release(to_nnf(a, true), to_nnf(b, true)),
        (Ltl::Release(a, b), false) => Ltl::release(to_nnf(a, false), to_nnf(b, false)),
        (Ltl::Release(a, b), true) => Ltl::until(to_nnf(a, true), to_nnf(b, true)),
    }
}

/// Symbolic tableau of an NNF formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    /// One Boolean state variable per `X`-subformula, with the subformula
    /// it stands for.
    pub vars: Vec<(StateVar, Ltl)>,
    pub init: Term,
    pub trans: Term,
    pub fairness: Vec<Term>,
}

struct TableauBuilder<'a> {
    sys: &'a TransitionSystem,
    taken: &'a mut BTreeSet<String>,
    index: BTreeMap<Ltl, usize>,
    vars: Vec<(StateVar, Ltl)>,
    pending: Vec<usize>,
    fairness: BTreeMap<Ltl, Term>,
}

impl TableauBuilder<'_> {
    /// The variable standing for `X body`.
    fn var(&mut self, body: &Ltl) -> Term {
        let i = match self.index.get(body) {
            Some(i) => *i,
            None => {
                let current = fresh_name(&format!("ltl.x{}", self.vars.len()), self.taken);
                let next = fresh_name(&format!("{}.next", current), self.taken);
                let i = self.vars.len();
                self.vars.push((StateVar { current, next, sort: Sort::Bool }, body.clone()));
                self.index.insert(body.clone(), i);
                self.pending.push(i);
                i
            }
        };
        Term::Var(self.vars[i].0.current.clone(), Sort::Bool)
    }

    fn enc(&mut self, f: &Ltl) -> Term {
        match f {
            Ltl::Atom(t) => t.clone(),
            Ltl::Not(a) => Term::not(self.enc(a)),
            Ltl::And(a, b) => {
                let (a, b) = (self.enc(a), self.enc(b));
                Term::and([a, b])
            }
            Ltl::Or(a, b) => {
                let (a, b) = (self.enc(a), self.enc(b));
                Term::or([a, b])
            }
            Ltl::Next(a) => self.var(a),
            Ltl::Until(a, b) => {
                let (p, q, v) = (self.enc(a), self.enc(b), self.var(f));
                self.fairness.entry(f.clone()).or_insert_with(|| Term::or([q.clone(), Term::not(v.clone())]));
                Term::or([q, Term::and([p, v])])
            }
            Ltl::Release(a, b) => {
                let (p, q, v) = (self.enc(a), self.enc(b), self.var(f));
                Term::and([q, Term::or([p, v])])
            }
            Ltl::Implies(..) | Ltl::Finally(_) | Ltl::Globally(_) => self.enc(&nnf(f)),
        }
    }
}

/// Builds the tableau of `psi` (which should be in NNF) over the state
/// variables of `sys`; fresh names are drawn from outside `taken`.
pub fn build_tableau(psi: &Ltl, sys: &TransitionSystem, taken: &mut BTreeSet<String>) -> Tableau {
    let mut b = TableauBuilder {
        sys,
        taken,
        index: BTreeMap::new(),
        vars: Vec::new(),
        pending: Vec::new(),
        fairness: BTreeMap::new(),
    };
    let init = b.enc(psi);
    let mut steps = Vec::new();
    while let Some(i) = b.pending.pop() {
        let body = b.vars[i].1.clone();
        let e = b.enc(&body);
        steps.push((i, e));
    }
    steps.sort_by_key(|(i, _)| *i);
    let primes: BTreeMap<String, String> = b
        .sys
        .states
        .iter()
        .chain(b.vars.iter().map(|(v, _)| v))
        .map(|s| (s.current.clone(), s.next.clone()))
        .collect();
    let trans = Term::and(steps.into_iter().map(|(i, e)| {
        let v = Term::Var(b.vars[i].0.current.clone(), Sort::Bool);
        Term::iff(v, e.rename(&|n| primes.get(n).cloned()))
    }));
    // Order fairness terms by the variable of their U-subformula.
    let mut fairness: Vec<(usize, Term)> = b.fairness.iter().map(|(f, t)| (b.index[f], t.clone())).collect();
    fairness.sort_by_key(|(i, _)| *i);
    Tableau { vars: b.vars, init, trans, fairness: fairness.into_iter().map(|(_, t)| t).collect() }
}

/// Counter that wraps after seeing every fairness condition in turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monitor {
    pub vars: Vec<StateVar>,
    pub init: Term,
    pub trans: Term,
    /// `¬(counter = n)`; holds from some point on exactly on unfair paths.
    pub live: Term,
}

/// Degeneralizes `fairness`. The counter is an `Int` when `use_int`, else a
/// binary Bool vector.
pub fn degeneralize(fairness: &[Term], use_int: bool, taken: &mut BTreeSet<String>) -> Monitor {
    let n = fairness.len();
    if n == 0 {
        return Monitor { vars: Vec::new(), init: Term::tt(), trans: Term::tt(), live: Term::ff() };
    }
    let mut vars = Vec::new();
    let mut fresh = |base: &str, sort: Sort| {
        let current = fresh_name(base, taken);
        let next = fresh_name(&format!("{}.next", current), taken);
        vars.push(StateVar { current, next, sort });
    };
    if use_int {
        fresh("ltl.c", Sort::Int);
    } else {
        let bits = usize::BITS - n.leading_zeros();
        for j in 0..bits {
            fresh(&format!("ltl.c{}", j), Sort::Bool);
        }
    }
    let is = |k: usize, next: bool| -> Term {
        let name = |s: &StateVar| if next { s.next.clone() } else { s.current.clone() };
        if use_int {
            Term::eq(Term::Var(name(&vars[0]), Sort::Int), Term::int(k as i128))
        } else {
            Term::and(vars.iter().enumerate().map(|(j, s)| {
                let v = Term::Var(name(s), Sort::Bool);
                if (k >> j) & 1 == 1 {
                    v
                } else {
                    Term::not(v)
                }
            }))
        }
    };
    let trans = Term::and((0..=n).map(|k| {
        let step = if k == n { is(0, true) } else { Term::ite(fairness[k].clone(), is(k + 1, true), is(k, true)) };
        Term::implies(is(k, false), step)
    }));
    Monitor { init: is(0, false), trans, live: Term::not(is(n, false)), vars }
}

/// Adds the product with the tableau of `¬phi` and a live property
/// `new_idx` that holds exactly when `doc` satisfies `phi`.
pub fn ltl_to_vmt(doc: &VmtDocument, phi: &Ltl, new_idx: u64) -> Result<VmtDocument, LtlError> {
    if doc.property(new_idx).is_some() {
        return Err(LtlError::IndexInUse(new_idx));
    }
    let mut atoms = Vec::new();
    phi.atoms(&mut atoms);
    for a in &atoms {
        check_atom(&doc.system, a)?;
    }
    let mut taken = doc.declared_names();
    let psi = nnf(&Ltl::not(phi.clone()));
    let tableau = build_tableau(&psi, &doc.system, &mut taken);
    let monitor = degeneralize(&tableau.fairness, doc.uses_arithmetic(), &mut taken);

    let mut out = doc.clone();
    let new_vars: Vec<StateVar> = tableau.vars.iter().map(|(v, _)| v.clone()).chain(monitor.vars.iter().cloned()).collect();
    for v in &new_vars {
        out.symbol_order.push(v.current.clone());
        out.symbol_order.push(v.next.clone());
    }
    out.system.states.extend(new_vars);
    out.system.init = Term::and([doc.system.init.clone(), tableau.init, monitor.init]);
    out.system.trans = Term::and([doc.system.trans.clone(), tableau.trans, monitor.trans]);
    out.properties.push(PropertySpec { kind: PropertyKind::Live, index: new_idx, formula: monitor.live });
    Ok(out)
}

/// Prints a name so that [`parse_ltl`] reads it back as an atom.
pub fn atom_text(name: &str) -> String {
    if is_operator_word(name) {
        format!("|{}|", name)
    } else {
        quote_symbol(name)
    }
}
