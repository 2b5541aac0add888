//! Transition systems and properties extracted from VMT-LIB annotations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::elab::{elaborate, expand_defines, Decl, Definition, SortDecl};
use crate::error::FrontendError;
use crate::script::{is_true_symbol, parse_script, Command, CommandKind};
use crate::sexpr::{Pos, SExpr};
use crate::sort::Sort;
use crate::term::{Op, Term};

/// A state variable: the current symbol and the symbol for its next value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVar {
    pub current: String,
    pub next: String,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    pub states: Vec<StateVar>,
    pub inputs: Vec<(String, Sort)>,
    pub init: Term,
    pub trans: Term,
}

impl TransitionSystem {
    pub fn state_by_current(&self, name: &str) -> Option<&StateVar> {
        self.states.iter().find(|s| s.current == name)
    }

    pub fn state_by_next(&self, name: &str) -> Option<&StateVar> {
        self.states.iter().find(|s| s.next == name)
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs.iter().any(|(n, _)| n == name)
    }

    /// Replaces current-state symbols by their next-state partners.
    pub fn prime(&self, t: &Term) -> Result<Term, ModelError> {
        self.check_unmixed(t)?;
        Ok(t.rename(&|n| self.state_by_current(n).map(|s| s.next.clone())))
    }

    /// Replaces next-state symbols by their current-state partners.
    pub fn unprime(&self, t: &Term) -> Result<Term, ModelError> {
        self.check_unmixed(t)?;
        Ok(t.rename(&|n| self.state_by_next(n).map(|s| s.current.clone())))
    }

    fn check_unmixed(&self, t: &Term) -> Result<(), ModelError> {
        let free = t.free_vars();
        let has_cur = free.iter().any(|n| self.state_by_current(n).is_some());
        let has_next = free.iter().any(|n| self.state_by_next(n).is_some());
        if has_cur && has_next {
            Err(ModelError::MixedStateVersions { term: format!("{}", t) })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyKind {
    Invariant,
    Live,
}

impl PropertyKind {
    pub fn keyword(self) -> &'static str {
        match self {
            PropertyKind::Invariant => "invar-property",
            PropertyKind::Live => "live-property",
        }
    }
}

/// `G formula` for invariants, `F G formula` for live properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub kind: PropertyKind,
    pub index: u64,
    pub formula: Term,
}

/// A declared (rigid) function of arity at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDecl {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
}

/// Where the pieces of a document came from; not part of document equality.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub init: Vec<(Pos, Term)>,
    pub trans: Vec<(Pos, Term)>,
    pub properties: BTreeMap<u64, Pos>,
    pub next: BTreeMap<String, Pos>,
}

#[derive(Debug, Clone)]
pub struct VmtDocument {
    pub logic: Option<String>,
    pub options: Vec<(String, Option<SExpr>)>,
    pub sorts: Vec<SortDecl>,
    pub functions: Vec<FunDecl>,
    pub system: TransitionSystem,
    pub properties: Vec<PropertySpec>,
    /// Definitions not reachable from any annotation, with macros expanded.
    pub definitions: Vec<Definition>,
    /// Declared symbol names in source order, used for printing.
    pub symbol_order: Vec<String>,
    pub sources: SourceMap,
}

impl PartialEq for VmtDocument {
    fn eq(&self, other: &Self) -> bool {
        self.logic == other.logic
            && self.options == other.options
            && self.sorts == other.sorts
            && self.functions == other.functions
            && self.system == other.system
            && self.properties == other.properties
            && self.definitions.len() == other.definitions.len()
            && self.definitions.iter().zip(&other.definitions).all(|(a, b)| {
                a.name == b.name && a.params == b.params && a.result == b.result && a.body == b.body
            })
    }
}

impl Eq for VmtDocument {}

impl VmtDocument {
    /// A document with no declarations, `init = trans = true` and no
    /// properties.
    pub fn empty() -> Self {
        VmtDocument {
            logic: None,
            options: Vec::new(),
            sorts: Vec::new(),
            functions: Vec::new(),
            system: TransitionSystem {
                states: Vec::new(),
                inputs: Vec::new(),
                init: Term::tt(),
                trans: Term::tt(),
            },
            properties: Vec::new(),
            definitions: Vec::new(),
            symbol_order: Vec::new(),
            sources: SourceMap::default(),
        }
    }

    pub fn property(&self, index: u64) -> Option<&PropertySpec> {
        self.properties.iter().find(|p| p.index == index)
    }

    /// Every declared symbol name: states (both versions), inputs, functions.
    pub fn declared_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in &self.system.states {
            out.insert(s.current.clone());
            out.insert(s.next.clone());
        }
        out.extend(self.system.inputs.iter().map(|(n, _)| n.clone()));
        out.extend(self.functions.iter().map(|f| f.name.clone()));
        out.extend(self.definitions.iter().map(|d| d.name.clone()));
        out.extend(self.sorts.iter().map(|s| s.name().to_string()));
        out
    }

    /// Declarations in printing order: the recorded source order first,
    /// then anything not mentioned there.
    pub fn declarations(&self) -> Vec<(String, Vec<Sort>, Sort)> {
        let mut all: Vec<(String, Vec<Sort>, Sort)> = Vec::new();
        for s in &self.system.states {
            all.push((s.current.clone(), Vec::new(), s.sort.clone()));
            all.push((s.next.clone(), Vec::new(), s.sort.clone()));
        }
        for (n, s) in &self.system.inputs {
            all.push((n.clone(), Vec::new(), s.clone()));
        }
        for f in &self.functions {
            all.push((f.name.clone(), f.args.clone(), f.result.clone()));
        }
        let mut out = Vec::with_capacity(all.len());
        let mut taken = alloc::vec![false; all.len()];
        for name in &self.symbol_order {
            if let Some(i) = all.iter().position(|(n, _, _)| n == name) {
                if !taken[i] {
                    taken[i] = true;
                    out.push(all[i].clone());
                }
            }
        }
        for (i, d) in all.into_iter().enumerate() {
            if !taken[i] {
                out.push(d);
            }
        }
        out
    }

    /// A symbol table with every declaration and kept definition, for
    /// elaborating further terms against this document.
    pub fn symbol_table(&self) -> crate::elab::SymbolTable {
        let mut st = crate::elab::SymbolTable::new();
        for s in &self.sorts {
            let _ = st.declare_sort(s.clone(), Pos::default());
        }
        for (n, args, r) in self.declarations() {
            let _ = st.declare_fun(&n, args, r, Pos::default());
        }
        for d in &self.definitions {
            let _ = st.define(d.clone());
        }
        st
    }

    /// True when any declared symbol or function is of arithmetic sort.
    pub fn uses_arithmetic(&self) -> bool {
        if let Some(l) = &self.logic {
            if l.contains("IA") || l.contains("RA") || l.contains("IRA") || l == "ALL" {
                return true;
            }
        }
        let arith = |s: &Sort| {
            let mut stack = alloc::vec![s];
            while let Some(s) = stack.pop() {
                match s {
                    Sort::Int | Sort::Real => return true,
                    Sort::Array(i, e) => {
                        stack.push(i);
                        stack.push(e);
                    }
                    Sort::Uninterpreted(_, a) => stack.extend(a.iter()),
                    _ => {}
                }
            }
            false
        };
        self.declarations()
            .iter()
            .any(|(_, args, r)| arith(r) || args.iter().any(arith))
    }
}

/// Errors raised while extracting a transition system.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error("{pos}: `:next` target `{name}` is not a declared variable")]
    NextTargetUndeclared { name: String, pos: Pos },
    #[error("{pos}: `:next` must annotate a declared variable")]
    NextSourceNotVariable { pos: Pos },
    #[error("{pos}: `{name}` is declared as its own next-state variable")]
    NextSelfReference { name: String, pos: Pos },
    #[error("{pos}: `{current}` and its next-state variable `{next}` have different sorts")]
    NextSortMismatch { current: String, next: String, pos: Pos },
    #[error("{pos}: `{current}` has more than one next-state variable")]
    DuplicateNext { current: String, pos: Pos },
    #[error("{pos}: `{first}` and `{second}` share the next-state variable `{target}`")]
    NextNotInjective {
        first: String,
        second: String,
        target: String,
        pos: Pos,
    },
    #[error("{pos}: `{name}` is used both as a current-state and as a next-state variable")]
    NextChain { name: String, pos: Pos },
    #[error("{pos}: property index {index} is used more than once")]
    DuplicatePropertyIndex { index: u64, pos: Pos },
    #[error("{pos}: `:{attr}` annotates a term of sort {sort}, expected Bool")]
    NonBooleanAnnotation { attr: String, sort: String, pos: Pos },
    #[error("{pos}: malformed `:{attr}` annotation: {reason}")]
    MalformedAnnotation { attr: String, reason: String, pos: Pos },
    #[error("term mixes current- and next-state variables: {term}")]
    MixedStateVersions { term: String },
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Frontend(e) => e.code(),
            ModelError::NextTargetUndeclared { .. } => "NextTargetUndeclared",
            ModelError::NextSourceNotVariable { .. } => "NextSourceNotVariable",
            ModelError::NextSelfReference { .. } => "NextSelfReference",
            ModelError::NextSortMismatch { .. } => "NextSortMismatch",
            ModelError::DuplicateNext { .. } => "DuplicateNext",
            ModelError::NextNotInjective { .. } => "NextNotInjective",
            ModelError::NextChain { .. } => "NextChain",
            ModelError::DuplicatePropertyIndex { .. } => "DuplicatePropertyIndex",
            ModelError::NonBooleanAnnotation { .. } => "NonBooleanAnnotation",
            ModelError::MalformedAnnotation { .. } => "MalformedAnnotation",
            ModelError::MixedStateVersions { .. } => "MixedStateVersions",
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        match self {
            ModelError::Frontend(e) => Some(e.pos()),
            ModelError::NextTargetUndeclared { pos, .. }
            | ModelError::NextSourceNotVariable { pos }
            | ModelError::NextSelfReference { pos, .. }
            | ModelError::NextSortMismatch { pos, .. }
            | ModelError::DuplicateNext { pos, .. }
            | ModelError::NextNotInjective { pos, .. }
            | ModelError::NextChain { pos, .. }
            | ModelError::DuplicatePropertyIndex { pos, .. }
            | ModelError::NonBooleanAnnotation { pos, .. }
            | ModelError::MalformedAnnotation { pos, .. } => Some(*pos),
            ModelError::MixedStateVersions { .. } => None,
        }
    }
}

const SEMANTIC_KEYWORDS: &[&str] = &["next", "init", "trans", "invar-property", "live-property"];

/// Parses and extracts a document from VMT-LIB text.
pub fn parse_vmt(text: &str) -> Result<VmtDocument, ModelError> {
    extract(&parse_script(text)?)
}

/// Builds the transition system and property list from annotated commands.
pub fn extract(commands: &[Command]) -> Result<VmtDocument, ModelError> {
    let el = elaborate(commands)?;
    let st = &el.symtab;

    let mut pairs: Vec<(String, String, Pos)> = Vec::new();
    let mut sources = SourceMap::default();
    let mut properties: Vec<PropertySpec> = Vec::new();
    let mut roots: Vec<&Term> = Vec::new();
    let mut aux: Vec<&Definition> = Vec::new();

    for def in &el.definitions {
        let (inner, attrs) = match &def.body {
            Term::Annot(inner, attrs)
                if def.params.is_empty() && attrs.iter().any(|a| SEMANTIC_KEYWORDS.contains(&a.keyword.as_str())) =>
            {
                (inner.as_ref(), attrs)
            }
            _ => {
                aux.push(def);
                continue;
            }
        };
        roots.push(inner);
        let pos = def.pos;
        for attr in attrs {
            let kw = attr.keyword.as_str();
            let boolean = |inner: &Term| -> Result<Term, ModelError> {
                if !inner.sort().is_bool() {
                    return Err(ModelError::NonBooleanAnnotation {
                        attr: kw.to_string(),
                        sort: format!("{}", inner.sort()),
                        pos,
                    });
                }
                Ok(expand_defines(inner, st)?.strip_annotations())
            };
            let malformed = |reason: &str| ModelError::MalformedAnnotation {
                attr: kw.to_string(),
                reason: reason.to_string(),
                pos,
            };
            match kw {
                "next" => {
                    let target = attr
                        .value
                        .as_ref()
                        .and_then(SExpr::as_symbol)
                        .ok_or_else(|| malformed("expected a variable name"))?;
                    let current = match inner.strip_annotations() {
                        Term::Var(n, _) if matches!(st.get(&n), Some(Decl::Fun { args, .. }) if args.is_empty()) => n,
                        _ => return Err(ModelError::NextSourceNotVariable { pos }),
                    };
                    pairs.push((current, target.to_string(), pos));
                }
                "init" | "trans" => {
                    if let Some(v) = &attr.value {
                        if !is_true_symbol(v) {
                            return Err(malformed("the only allowed value is `true`"));
                        }
                    }
                    let t = boolean(inner)?;
                    if kw == "init" {
                        sources.init.push((pos, t));
                    } else {
                        sources.trans.push((pos, t));
                    }
                }
                "invar-property" | "live-property" => {
                    let index: u64 = attr
                        .value
                        .as_ref()
                        .and_then(SExpr::as_numeral)
                        .and_then(|n| n.parse().ok())
                        .ok_or_else(|| malformed("expected a non-negative integer index"))?;
                    let formula = boolean(inner)?;
                    if properties.iter().any(|p| p.index == index) {
                        return Err(ModelError::DuplicatePropertyIndex { index, pos });
                    }
                    sources.properties.insert(index, pos);
                    properties.push(PropertySpec {
                        kind: if kw == "invar-property" {
                            PropertyKind::Invariant
                        } else {
                            PropertyKind::Live
                        },
                        index,
                        formula,
                    });
                }
                _ => {}
            }
        }
    }

    // Pair current and next symbols.
    let mut next_of: BTreeMap<String, String> = BTreeMap::new();
    let mut current_of: BTreeMap<String, String> = BTreeMap::new();
    for (cur, target, pos) in &pairs {
        let pos = *pos;
        let cur_sort = match st.get(cur) {
            Some(Decl::Fun { result, .. }) => result.clone(),
            _ => return Err(ModelError::NextSourceNotVariable { pos }),
        };
        let target_sort = match st.get(target) {
            Some(Decl::Fun { args, result, .. }) if args.is_empty() => result.clone(),
            _ => {
                return Err(ModelError::NextTargetUndeclared {
                    name: target.clone(),
                    pos,
                })
            }
        };
        if cur == target {
            return Err(ModelError::NextSelfReference { name: cur.clone(), pos });
        }
        if cur_sort != target_sort {
            return Err(ModelError::NextSortMismatch {
                current: cur.clone(),
                next: target.clone(),
                pos,
            });
        }
        if next_of.contains_key(cur) {
            return Err(ModelError::DuplicateNext { current: cur.clone(), pos });
        }
        if let Some(first) = current_of.get(target) {
            return Err(ModelError::NextNotInjective {
                first: first.clone(),
                second: cur.clone(),
                target: target.clone(),
                pos,
            });
        }
        next_of.insert(cur.clone(), target.clone());
        current_of.insert(target.clone(), cur.clone());
        sources.next.insert(cur.clone(), pos);
    }
    for (cur, target, pos) in &pairs {
        if current_of.contains_key(cur) {
            return Err(ModelError::NextChain { name: cur.clone(), pos: *pos });
        }
        if next_of.contains_key(target) {
            return Err(ModelError::NextChain {
                name: target.clone(),
                pos: *pos,
            });
        }
    }

    let mut states = Vec::new();
    let mut inputs = Vec::new();
    let mut functions = Vec::new();
    let mut symbol_order = Vec::new();
    for (name, decl) in st.iter() {
        if let Decl::Fun { args, result, .. } = decl {
            symbol_order.push(name.to_string());
            if !args.is_empty() {
                functions.push(FunDecl {
                    name: name.to_string(),
                    args: args.clone(),
                    result: result.clone(),
                });
            } else if let Some(next) = next_of.get(name) {
                states.push(StateVar {
                    current: name.to_string(),
                    next: next.clone(),
                    sort: result.clone(),
                });
            } else if !current_of.contains_key(name) {
                inputs.push((name.to_string(), result.clone()));
            }
        }
    }

    // Definitions that no annotated term refers to, directly or indirectly.
    let mut reachable = BTreeSet::new();
    let mut work: Vec<String> = Vec::new();
    for r in &roots {
        let mut syms = BTreeSet::new();
        r.applied_symbols(&mut syms);
        work.extend(syms);
    }
    while let Some(n) = work.pop() {
        if !reachable.insert(n.clone()) {
            continue;
        }
        if let Some(Decl::Macro(d)) = st.get(&n) {
            let mut syms = BTreeSet::new();
            d.body.applied_symbols(&mut syms);
            work.extend(syms);
        }
    }
    let mut definitions = Vec::new();
    for d in aux {
        if reachable.contains(&d.name) {
            continue;
        }
        definitions.push(Definition {
            body: expand_defines(&d.body, st)?.strip_annotations(),
            ..d.clone()
        });
    }

    let system = TransitionSystem {
        states,
        inputs,
        init: Term::and(sources.init.iter().map(|(_, t)| t.clone())),
        trans: Term::and(sources.trans.iter().map(|(_, t)| t.clone())),
    };
    Ok(VmtDocument {
        logic: el.logic.clone(),
        options: el.options.clone(),
        sorts: st.sorts().cloned().collect(),
        functions,
        system,
        properties,
        definitions,
        symbol_order,
        sources,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub pos: Option<Pos>,
}

impl Diagnostic {
    fn error(code: &'static str, message: String, pos: Option<Pos>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message,
            pos,
        }
    }

    fn warning(code: &'static str, message: String, pos: Option<Pos>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message,
            pos,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.pos {
            write!(f, "{}: ", p)?;
        }
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}[{}]: {}", sev, self.code, self.message)
    }
}

enum Scope {
    Init,
    Trans,
    Property,
}

/// Checks the well-formedness rules of a document. An empty result means
/// the document is well formed.
pub fn validate(doc: &VmtDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let sys = &doc.system;

    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for s in &sys.states {
        let pos = doc.sources.next.get(&s.current).copied();
        if s.current == s.next {
            out.push(Diagnostic::error(
                "NextSelfReference",
                format!("`{}` is declared as its own next-state variable", s.current),
                pos,
            ));
        }
        if let Some(first) = seen.get(s.next.as_str()) {
            out.push(Diagnostic::error(
                "NextNotInjective",
                format!("`{}` and `{}` share the next-state variable `{}`", first, s.current, s.next),
                pos,
            ));
        } else {
            seen.insert(&s.next, &s.current);
        }
    }
    let currents: Vec<&str> = sys.states.iter().map(|s| s.current.as_str()).collect();
    let nexts: BTreeSet<&str> = sys.states.iter().map(|s| s.next.as_str()).collect();
    let mut roles: BTreeMap<&str, usize> = BTreeMap::new();
    for n in currents.iter().chain(nexts.iter()).copied().chain(sys.inputs.iter().map(|(n, _)| n.as_str())) {
        *roles.entry(n).or_default() += 1;
    }
    for (n, count) in &roles {
        let self_loop = sys.states.iter().any(|s| s.current == *n && s.next == *n);
        if *count > 1 && !self_loop {
            out.push(Diagnostic::error(
                "StateInputOverlap",
                format!("`{}` is used in more than one role (state, next-state or input)", n),
                None,
            ));
        }
    }

    let check = |t: &Term, scope: Scope, what: &str, pos: Option<Pos>, out: &mut Vec<Diagnostic>| {
        if !t.sort().is_bool() {
            out.push(Diagnostic::error(
                "NonBooleanAnnotation",
                format!("{} has sort {}, expected Bool", what, t.sort()),
                pos,
            ));
        }
        for v in t.free_vars() {
            let is_cur = sys.state_by_current(&v).is_some();
            let is_next = sys.state_by_next(&v).is_some();
            let is_input = sys.is_input(&v);
            let code = match scope {
                Scope::Init if is_next => Some("InitUsesNextVar"),
                Scope::Init if is_input => Some("InitUsesInput"),
                Scope::Property if is_next => Some("PropertyUsesNextVar"),
                Scope::Property if is_input => Some("PropertyUsesInput"),
                _ if !(is_cur || is_next || is_input) => Some("UnknownSymbol"),
                _ => None,
            };
            if let Some(code) = code {
                out.push(Diagnostic::error(code, format!("{} mentions `{}`", what, v), pos));
            }
        }
    };

    let parts = |recorded: &[(Pos, Term)], whole: &Term| -> Vec<(Option<Pos>, Term)> {
        if !recorded.is_empty() && Term::and(recorded.iter().map(|(_, t)| t.clone())) == *whole {
            recorded.iter().map(|(p, t)| (Some(*p), t.clone())).collect()
        } else {
            alloc::vec![(None, whole.clone())]
        }
    };
    for (pos, t) in parts(&doc.sources.init, &sys.init) {
        check(&t, Scope::Init, "init", pos, &mut out);
    }
    for (pos, t) in parts(&doc.sources.trans, &sys.trans) {
        check(&t, Scope::Trans, "trans", pos, &mut out);
    }

    let mut indices = BTreeSet::new();
    for p in &doc.properties {
        let pos = doc.sources.properties.get(&p.index).copied();
        if !indices.insert(p.index) {
            out.push(Diagnostic::error(
                "DuplicatePropertyIndex",
                format!("property index {} is used more than once", p.index),
                pos,
            ));
        }
        check(&p.formula, Scope::Property, &format!("property {}", p.index), pos, &mut out);
    }

    if doc.properties.is_empty() {
        out.push(Diagnostic::warning("NoProperties", "the document declares no properties".to_string(), None));
    }
    for d in &doc.definitions {
        out.push(Diagnostic::warning(
            "UnusedDefinition",
            format!("`{}` is not used by any annotated term", d.name),
            Some(d.pos),
        ));
    }
    out
}

pub(crate) fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut i = 0;
    while taken.contains(&name) {
        i += 1;
        name = format!("{}.{}", base, i);
    }
    taken.insert(name.clone());
    name
}

fn define_line(out: &mut String, name: &str, sort: &Sort, body: &Term, attr: &str) {
    out.push_str(&format!(
        "(define-fun {} () {} (! {} {}))\n",
        crate::sexpr::quote_symbol(name),
        sort,
        body,
        attr
    ));
}

/// Prints a document as VMT-LIB text.
pub fn print_vmt(doc: &VmtDocument) -> String {
    let mut out = String::new();
    let mut taken = doc.declared_names();
    if let Some(l) = &doc.logic {
        out.push_str(&format!("{}\n", CommandKind::SetLogic(l.clone())));
    }
    for (n, v) in &doc.options {
        out.push_str(&format!("{}\n", CommandKind::SetOption(n.clone(), v.clone())));
    }
    for s in &doc.sorts {
        out.push_str(&format!("{}\n", s.to_command()));
    }
    for (n, args, r) in doc.declarations() {
        out.push_str(&format!("{}\n", CommandKind::DeclareFun(n, args, r)));
    }
    for s in &doc.system.states {
        let name = fresh_name(&format!("sv.{}", s.current), &mut taken);
        let attr = format!(":next {}", crate::sexpr::quote_symbol(&s.next));
        define_line(&mut out, &name, &s.sort, &Term::Var(s.current.clone(), s.sort.clone()), &attr);
    }
    for d in &doc.definitions {
        let mut cmd = String::new();
        cmd.push_str("(define-fun ");
        cmd.push_str(&crate::sexpr::quote_symbol(&d.name));
        cmd.push_str(" (");
        for (i, (p, s)) in d.params.iter().enumerate() {
            if i > 0 {
                cmd.push(' ');
            }
            cmd.push_str(&format!("({} {})", crate::sexpr::quote_symbol(p), s));
        }
        cmd.push_str(&format!(") {} {})\n", d.result, d.body));
        out.push_str(&cmd);
    }
    let init = fresh_name("init", &mut taken);
    define_line(&mut out, &init, &Sort::Bool, &doc.system.init, ":init true");
    let trans = fresh_name("trans", &mut taken);
    define_line(&mut out, &trans, &Sort::Bool, &doc.system.trans, ":trans true");
    for p in &doc.properties {
        let name = fresh_name(&format!("p{}", p.index), &mut taken);
        let attr = format!(":{} {}", p.kind.keyword(), p.index);
        define_line(&mut out, &name, &Sort::Bool, &p.formula, &attr);
    }
    out.push_str("(assert true)\n");
    out
}

/// Substitutes `Op::Uf` names; used by callers that rename rigid symbols.
pub fn rename_functions(t: &Term, map: &BTreeMap<String, String>) -> Term {
    t.map_ops(&|op| match op {
        Op::Uf(n) => map.get(n).map(|m| Op::Uf(m.clone())),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) const COUNTER_EXAMPLE: &str = "\
; declaring the state variable x
(declare-const x Int)
(declare-const x.next Int)
(define-fun sv.x () Int (! x :next x.next))

(declare-const b Bool)
(define-fun init () Bool
         (! (= x 1) :init))
(define-fun trans () Bool
   (! (= x.next (ite b (+ x 1) x)) :trans))
(define-fun p1 () Bool
              (! (> x 0) :invar-property 1))
(define-fun p2 () Bool
              (! (> x 10) :live-property 2))
";

    #[test]
    fn extracts_the_worked_example() {
        let doc = parse_vmt(COUNTER_EXAMPLE).unwrap();
        let sys = &doc.system;
        assert_eq!(
            sys.states,
            vec![StateVar {
                current: "x".into(),
                next: "x.next".into(),
                sort: Sort::Int
            }]
        );
        assert_eq!(sys.inputs, vec![("b".to_string(), Sort::Bool)]);
        assert_eq!(sys.init.to_string(), "(= x 1)");
        assert_eq!(sys.trans.to_string(), "(= x.next (ite b (+ x 1) x))");
        assert_eq!(doc.properties.len(), 2);
        assert_eq!(doc.properties[0].kind, PropertyKind::Invariant);
        assert_eq!(doc.properties[0].index, 1);
        assert_eq!(doc.properties[0].formula.to_string(), "(> x 0)");
        assert_eq!(doc.properties[1].kind, PropertyKind::Live);
        assert_eq!(doc.properties[1].index, 2);
        assert_eq!(doc.properties[1].formula.to_string(), "(> x 10)");
        assert!(validate(&doc).is_empty(), "{:?}", validate(&doc));
    }

    #[test]
    fn defaults_without_annotations() {
        let doc = parse_vmt("(declare-fun v () Bool)\n(declare-fun w () Bool)\n(define-fun s () Bool (! v :next w))").unwrap();
        assert!(doc.system.init.is_true());
        assert!(doc.system.trans.is_true());
        assert_eq!(doc.system.states.len(), 1);
        assert!(doc.properties.is_empty());
        let diags = validate(&doc);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "NoProperties");
        assert_eq!(diags[0].severity, Severity::Warning);
    }

    #[test]
    fn shared_next_target_is_rejected() {
        let err = parse_vmt(
            "(declare-fun a () Bool)(declare-fun b () Bool)(declare-fun n () Bool)\n\
             (define-fun sa () Bool (! a :next n))(define-fun sb () Bool (! b :next n))",
        )
        .unwrap_err();
        assert_eq!(err.code(), "NextNotInjective");
    }

    #[test]
    fn scope_violations_are_reported() {
        let doc = parse_vmt(
            "(declare-fun x () Int)(declare-fun x.next () Int)(declare-fun b () Bool)\n\
             (define-fun sv () Int (! x :next x.next))\n\
             (define-fun i () Bool (! (= x.next 1) :init true))\n\
             (define-fun p () Bool (! b :invar-property 0))",
        )
        .unwrap();
        let codes: Vec<&str> = validate(&doc).iter().map(|d| d.code).collect();
        assert_eq!(codes, vec!["InitUsesNextVar", "PropertyUsesInput"]);
    }

    #[test]
    fn priming_round_trip() {
        let doc = parse_vmt(COUNTER_EXAMPLE).unwrap();
        let sys = &doc.system;
        let p = &doc.properties[0].formula;
        assert_eq!(sys.prime(p).unwrap().to_string(), "(> x.next 0)");
        assert!(sys.prime(&Term::tt()).unwrap().is_true());
        let init = &sys.init;
        assert_eq!(&sys.unprime(&sys.prime(init).unwrap()).unwrap(), init);
        assert!(matches!(sys.prime(&sys.trans), Err(ModelError::MixedStateVersions { .. })));
    }

    #[test]
    fn print_round_trip() {
        let doc = parse_vmt(COUNTER_EXAMPLE).unwrap();
        let text = print_vmt(&doc);
        let again = parse_vmt(&text).unwrap();
        assert_eq!(doc, again);
        assert_eq!(print_vmt(&again), text);
    }

    #[test]
    fn empty_system_prints_dummy_annotations() {
        let text = print_vmt(&VmtDocument::empty());
        assert_eq!(
            text,
            "(define-fun init () Bool (! true :init true))\n(define-fun trans () Bool (! true :trans true))\n(assert true)\n"
        );
        assert_eq!(parse_vmt(&text).unwrap(), VmtDocument::empty());
    }

    #[test]
    fn unused_definitions_are_kept_and_flagged() {
        let doc = parse_vmt(
            "(declare-fun x () Int)(declare-fun y () Int)(define-fun s () Int (! x :next y))\n\
             (define-fun helper () Bool (> x 1))\n(define-fun lonely () Bool (< x 1))\n\
             (define-fun p () Bool (! helper :invar-property 3))",
        )
        .unwrap();
        assert_eq!(doc.definitions.len(), 1);
        assert_eq!(doc.definitions[0].name, "lonely");
        assert_eq!(doc.properties[0].formula.to_string(), "(> x 1)");
        let again = parse_vmt(&print_vmt(&doc)).unwrap();
        assert_eq!(doc, again);
        assert_eq!(validate(&doc)[0].code, "UnusedDefinition");
    }
}
