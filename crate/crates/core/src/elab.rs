//! Sort checking of parsed commands and macro expansion.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::FrontendError;
use crate::script::{Command, CommandKind};
use crate::sexpr::{Atom, Pos, SExpr, SExprKind};
use crate::sort::Sort;
use crate::term::{join_sorts, Attribute, BvConst, Constant, Op, Quantifier, Term, MAX_CONST_WIDTH};

/// A `define-fun` after sort checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<(String, Sort)>,
    pub result: Sort,
    pub body: Term,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Fun { args: Vec<Sort>, result: Sort, pos: Pos },
    Macro(Definition),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortDecl {
    Declared { name: String, arity: u32 },
    Alias { name: String, params: Vec<String>, body: Sort },
}

impl SortDecl {
    pub fn name(&self) -> &str {
        match self {
            SortDecl::Declared { name, .. } | SortDecl::Alias { name, .. } => name,
        }
    }

    pub fn to_command(&self) -> CommandKind {
        match self {
            SortDecl::Declared { name, arity } => CommandKind::DeclareSort(name.clone(), *arity),
            SortDecl::Alias { name, params, body } => CommandKind::DefineSort(name.clone(), params.clone(), body.clone()),
        }
    }
}

/// Declared functions, macros and sorts, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Decl>,
    order: Vec<String>,
    sorts: BTreeMap<String, SortDecl>,
    sort_order: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name) || self.sorts.contains_key(name)
    }

    /// Symbols in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Decl)> {
        self.order.iter().map(move |n| (n.as_str(), &self.symbols[n]))
    }

    pub fn sorts(&self) -> impl Iterator<Item = &SortDecl> {
        self.sort_order.iter().map(move |n| &self.sorts[n])
    }

    fn check_fresh(&self, name: &str, pos: Pos) -> Result<(), FrontendError> {
        if self.symbols.contains_key(name) {
            Err(FrontendError::DuplicateDeclaration {
                name: name.to_string(),
                pos,
            })
        } else {
            Ok(())
        }
    }

    pub fn declare_fun(&mut self, name: &str, args: Vec<Sort>, result: Sort, pos: Pos) -> Result<(), FrontendError> {
        self.check_fresh(name, pos)?;
        let args = args.iter().map(|s| self.resolve_sort(s, pos)).collect::<Result<_, _>>()?;
        let result = self.resolve_sort(&result, pos)?;
        self.symbols.insert(name.to_string(), Decl::Fun { args, result, pos });
        self.order.push(name.to_string());
        Ok(())
    }

    pub fn define(&mut self, def: Definition) -> Result<(), FrontendError> {
        self.check_fresh(&def.name, def.pos)?;
        self.order.push(def.name.clone());
        self.symbols.insert(def.name.clone(), Decl::Macro(def));
        Ok(())
    }

    pub fn declare_sort(&mut self, decl: SortDecl, pos: Pos) -> Result<(), FrontendError> {
        let name = decl.name().to_string();
        if self.sorts.contains_key(&name) || matches!(name.as_str(), "Bool" | "Int" | "Real" | "Array" | "BitVec") {
            return Err(FrontendError::DuplicateDeclaration { name, pos });
        }
        self.sort_order.push(name.clone());
        self.sorts.insert(name, decl);
        Ok(())
    }

    /// Resolves sort aliases and checks that user sorts are declared.
    pub fn resolve_sort(&self, s: &Sort, pos: Pos) -> Result<Sort, FrontendError> {
        match s {
            Sort::Bool | Sort::Int | Sort::Real | Sort::BitVec(_) => Ok(s.clone()),
            Sort::Array(i, e) => Ok(Sort::array(self.resolve_sort(i, pos)?, self.resolve_sort(e, pos)?)),
            Sort::Uninterpreted(name, args) => {
                let args: Vec<Sort> = args.iter().map(|a| self.resolve_sort(a, pos)).collect::<Result<_, _>>()?;
                match self.sorts.get(name) {
                    Some(SortDecl::Declared { arity, .. }) if *arity as usize == args.len() => {
                        Ok(Sort::Uninterpreted(name.clone(), args))
                    }
                    Some(SortDecl::Alias { params, body, .. }) if params.len() == args.len() => {
                        Ok(body.substitute(params, &args))
                    }
                    Some(_) => Err(FrontendError::InvalidSort {
                        reason: format!("wrong number of arguments for sort `{}`", name),
                        pos,
                    }),
                    None => Err(FrontendError::UnknownSort { name: name.clone(), pos }),
                }
            }
        }
    }
}

/// Result of sort checking a whole script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elaborated {
    pub logic: Option<String>,
    pub options: Vec<(String, Option<SExpr>)>,
    pub symtab: SymbolTable,
    /// Every `define-fun`, in document order.
    pub definitions: Vec<Definition>,
    pub has_trailing_assert: bool,
    pub warnings: Vec<(Pos, String)>,
}

/// Sort-checks every command; `declare-const` was already normalized to a
/// nullary `declare-fun` by the parser.
pub fn elaborate(commands: &[Command]) -> Result<Elaborated, FrontendError> {
    let mut out = Elaborated {
        logic: None,
        options: Vec::new(),
        symtab: SymbolTable::new(),
        definitions: Vec::new(),
        has_trailing_assert: false,
        warnings: Vec::new(),
    };
    for cmd in commands {
        let pos = cmd.pos;
        match &cmd.kind {
            CommandKind::SetLogic(l) => out.logic = Some(l.clone()),
            CommandKind::SetOption(n, v) => out.options.push((n.clone(), v.clone())),
            CommandKind::DeclareSort(name, arity) => out.symtab.declare_sort(
                SortDecl::Declared {
                    name: name.clone(),
                    arity: *arity,
                },
                pos,
            )?,
            CommandKind::DefineSort(name, params, body) => {
                let mut scratch = out.symtab.clone();
                for p in params {
                    scratch.declare_sort(
                        SortDecl::Declared {
                            name: p.clone(),
                            arity: 0,
                        },
                        pos,
                    )?;
                }
                let body = scratch.resolve_sort(body, pos)?;
                if !params.is_empty() {
                    out.warnings
                        .push((pos, format!("parametric sort alias `{}` is not portable across VMT-LIB tools", name)));
                }
                out.symtab.declare_sort(
                    SortDecl::Alias {
                        name: name.clone(),
                        params: params.clone(),
                        body,
                    },
                    pos,
                )?;
            }
            CommandKind::DeclareFun(name, args, result) => {
                out.symtab.declare_fun(name, args.clone(), result.clone(), pos)?
            }
            CommandKind::DefineFun(name, params, result, body) => {
                out.symtab.check_fresh(name, pos)?;
                let params: Vec<(String, Sort)> = params
                    .iter()
                    .map(|(n, s)| Ok((n.clone(), out.symtab.resolve_sort(s, pos)?)))
                    .collect::<Result<_, FrontendError>>()?;
                let result = out.symtab.resolve_sort(result, pos)?;
                let mut el = TermElaborator::new(&out.symtab);
                el.pending = Some(name.as_str());
                el.locals = params.clone();
                let term = el.term(body)?;
                if term.sort() != result {
                    return Err(FrontendError::SortMismatch {
                        symbol: name.clone(),
                        expected: format!("{}", result),
                        found: format!("{}", term.sort()),
                        pos: body.pos,
                    });
                }
                let def = Definition {
                    name: name.clone(),
                    params,
                    result,
                    body: term,
                    pos,
                };
                out.symtab.define(def.clone())?;
                out.definitions.push(def);
            }
            CommandKind::TrailingAssertTrue => out.has_trailing_assert = true,
        }
    }
    Ok(out)
}

/// Elaborates a single term against a symbol table, with optional local
/// variables in scope.
pub fn elaborate_term(e: &SExpr, symtab: &SymbolTable, locals: &[(String, Sort)]) -> Result<Term, FrontendError> {
    let mut el = TermElaborator::new(symtab);
    el.locals = locals.to_vec();
    el.term(e)
}

struct TermElaborator<'a> {
    symtab: &'a SymbolTable,
    locals: Vec<(String, Sort)>,
    pending: Option<&'a str>,
}

fn malformed(pos: Pos, reason: impl Into<String>) -> FrontendError {
    FrontendError::MalformedTerm {
        reason: reason.into(),
        pos,
    }
}

fn parse_index(e: &SExpr) -> Result<u32, FrontendError> {
    e.as_numeral()
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| malformed(e.pos, "expected a numeral index"))
}

fn bv_from_digits(digits: &str, radix: u32, pos: Pos) -> Result<BvConst, FrontendError> {
    let bits_per_digit = if radix == 16 { 4 } else { 1 };
    let width = digits.len() as u32 * bits_per_digit;
    if width > MAX_CONST_WIDTH {
        return Err(malformed(pos, "bit-vector literals wider than 128 bits are not supported"));
    }
    let value = u128::from_str_radix(digits, radix).map_err(|_| FrontendError::MalformedToken { pos })?;
    Ok(BvConst::new(width, value))
}

fn is_real_int_mix_op(op: &Op) -> bool {
    matches!(
        op,
        Op::Add | Op::Sub | Op::Mul | Op::RealDiv | Op::Le | Op::Lt | Op::Ge | Op::Gt | Op::Eq | Op::Distinct
    )
}

fn int_literal_as_real(t: Term) -> Term {
    match t {
        Term::Const(Constant::Int(n)) if n >= 0 => Term::Const(Constant::Real(format!("{}.0", n))),
        Term::App(Op::Neg, mut args, Sort::Int) if matches!(args[0], Term::Const(Constant::Int(_))) => {
            let inner = int_literal_as_real(args.pop().unwrap());
            Term::App(Op::Neg, alloc::vec![inner], Sort::Real)
        }
        other => other,
    }
}

impl<'a> TermElaborator<'a> {
    fn new(symtab: &'a SymbolTable) -> Self {
        TermElaborator {
            symtab,
            locals: Vec::new(),
            pending: None,
        }
    }

    fn local(&self, name: &str) -> Option<&Sort> {
        self.locals.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    fn symbol(&self, name: &str, pos: Pos) -> Result<Term, FrontendError> {
        if let Some(s) = self.local(name) {
            return Ok(Term::Var(name.to_string(), s.clone()));
        }
        match name {
            "true" => return Ok(Term::tt()),
            "false" => return Ok(Term::ff()),
            _ => {}
        }
        if self.pending == Some(name) {
            return Err(FrontendError::RecursiveDefinition {
                name: name.to_string(),
                pos,
            });
        }
        match self.symtab.get(name) {
            Some(Decl::Fun { args, result, .. }) if args.is_empty() => Ok(Term::Var(name.to_string(), result.clone())),
            Some(Decl::Fun { args, .. }) => Err(FrontendError::ArityMismatch {
                symbol: name.to_string(),
                expected: args.len(),
                found: 0,
                pos,
            }),
            Some(Decl::Macro(d)) if d.params.is_empty() => {
                Ok(Term::App(Op::Macro(name.to_string()), Vec::new(), d.result.clone()))
            }
            Some(Decl::Macro(d)) => Err(FrontendError::ArityMismatch {
                symbol: name.to_string(),
                expected: d.params.len(),
                found: 0,
                pos,
            }),
            None => Err(FrontendError::UnknownSymbol {
                name: name.to_string(),
                pos,
            }),
        }
    }

    fn term(&mut self, e: &SExpr) -> Result<Term, FrontendError> {
        match &e.kind {
            SExprKind::Atom(a) => match a {
                Atom::Symbol(s) => self.symbol(s, e.pos),
                Atom::Numeral(n) => n
                    .parse::<i128>()
                    .map(Term::int)
                    .map_err(|_| malformed(e.pos, "numeral out of range")),
                Atom::Decimal(d) => Ok(Term::Const(Constant::Real(d.clone()))),
                Atom::Hex(h) => Ok(Term::Const(Constant::BitVec(bv_from_digits(h, 16, e.pos)?))),
                Atom::Binary(b) => Ok(Term::Const(Constant::BitVec(bv_from_digits(b, 2, e.pos)?))),
                Atom::Str(_) => Err(malformed(e.pos, "string literals are not supported")),
                Atom::Keyword(_) => Err(malformed(e.pos, "unexpected keyword")),
            },
            SExprKind::List(items) => self.list(e, items),
        }
    }

    fn list(&mut self, e: &SExpr, items: &[SExpr]) -> Result<Term, FrontendError> {
        let head = items.first().ok_or_else(|| malformed(e.pos, "empty application"))?;
        match head.as_symbol() {
            Some("!") => return self.annotated(e, items),
            Some("let") => return self.let_term(e, items),
            Some(q @ ("forall" | "exists")) => {
                let q = if q == "forall" {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                return self.quantifier(e, q, items);
            }
            Some("_") => return self.indexed_constant(e, items),
            _ => {}
        }
        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        match &head.kind {
            SExprKind::Atom(Atom::Symbol(name)) => self.apply(name, args, head.pos),
            SExprKind::List(h) => {
                let op = match h.first().and_then(SExpr::as_symbol) {
                    Some("_") if h.len() >= 2 => {
                        let name = h[1].as_symbol().ok_or_else(|| malformed(head.pos, "bad indexed operator"))?;
                        let idx = h[2..].iter().map(parse_index).collect::<Result<Vec<_>, _>>()?;
                        Op::from_indexed(name, &idx).ok_or_else(|| FrontendError::UnknownSymbol {
                            name: name.to_string(),
                            pos: head.pos,
                        })?
                    }
                    Some("as") if h.len() == 3 && h[1].as_symbol() == Some("const") => {
                        let s = self.symtab.resolve_sort(&Sort::from_sexpr(&h[2])?, h[2].pos)?;
                        Op::ConstArray(s)
                    }
                    _ => return Err(malformed(head.pos, "unsupported operator form")),
                };
                self.theory_app(op, args, head)
            }
            _ => Err(malformed(head.pos, "expected a function symbol")),
        }
    }

    fn theory_app(&self, op: Op, mut args: Vec<Term>, head: &SExpr) -> Result<Term, FrontendError> {
        if is_real_int_mix_op(&op) {
            let any_real = args.iter().any(|a| a.sort() == Sort::Real);
            if any_real || op == Op::RealDiv {
                args = args.into_iter().map(int_literal_as_real).collect();
            }
        }
        Term::app(op.clone(), args).map_err(|err| FrontendError::SortMismatch {
            symbol: format!("{}", op),
            expected: err.expected,
            found: err.found,
            pos: head.pos,
        })
    }

    fn apply(&self, name: &str, args: Vec<Term>, pos: Pos) -> Result<Term, FrontendError> {
        if self.local(name).is_some() {
            return Err(malformed(pos, format!("`{}` is not a function", name)));
        }
        if name == "-" && args.len() == 1 {
            let head = SExpr::symbol("-");
            return self.theory_app(Op::Neg, args, &SExpr { pos, ..head });
        }
        if let Some(op) = Op::from_name(name) {
            let head = SExpr::symbol(name);
            return self.theory_app(op, args, &SExpr { pos, ..head });
        }
        if self.pending == Some(name) {
            return Err(FrontendError::RecursiveDefinition {
                name: name.to_string(),
                pos,
            });
        }
        let (expected, result, op) = match self.symtab.get(name) {
            Some(Decl::Fun { args, result, .. }) => (args.clone(), result.clone(), Op::Uf(name.to_string())),
            Some(Decl::Macro(d)) => (
                d.params.iter().map(|(_, s)| s.clone()).collect(),
                d.result.clone(),
                Op::Macro(name.to_string()),
            ),
            None => {
                return Err(FrontendError::UnknownSymbol {
                    name: name.to_string(),
                    pos,
                })
            }
        };
        if expected.len() != args.len() {
            return Err(FrontendError::ArityMismatch {
                symbol: name.to_string(),
                expected: expected.len(),
                found: args.len(),
                pos,
            });
        }
        let found: Vec<Sort> = args.iter().map(Term::sort).collect();
        if found != expected {
            return Err(FrontendError::SortMismatch {
                symbol: name.to_string(),
                expected: join_sorts(&expected),
                found: join_sorts(&found),
                pos,
            });
        }
        if expected.is_empty() {
            // nullary user symbols are variables or macro references
            return self.symbol(name, pos);
        }
        Ok(Term::App(op, args, result))
    }

    fn indexed_constant(&self, e: &SExpr, items: &[SExpr]) -> Result<Term, FrontendError> {
        if let [_, name, width] = items {
            if let Some(digits) = name.as_symbol().and_then(|s| s.strip_prefix("bv")) {
                let w = parse_index(width)?;
                if w == 0 || w > MAX_CONST_WIDTH {
                    return Err(malformed(e.pos, "unsupported bit-vector literal width"));
                }
                let value: u128 = digits.parse().map_err(|_| malformed(e.pos, "bad bit-vector literal"))?;
                if w < 128 && value >> w != 0 {
                    return Err(malformed(e.pos, "bit-vector literal does not fit its width"));
                }
                return Ok(Term::bv(w, value));
            }
        }
        Err(malformed(e.pos, "unsupported indexed identifier"))
    }

    fn annotated(&mut self, e: &SExpr, items: &[SExpr]) -> Result<Term, FrontendError> {
        if items.len() < 3 {
            return Err(malformed(e.pos, "annotation without attributes"));
        }
        let inner = self.term(&items[1])?;
        let mut attrs = Vec::new();
        let mut i = 2;
        while i < items.len() {
            let keyword = items[i]
                .as_keyword()
                .ok_or_else(|| malformed(items[i].pos, "expected an attribute keyword"))?;
            let value = match items.get(i + 1) {
                Some(v) if v.as_keyword().is_none() => {
                    i += 1;
                    Some(v.clone())
                }
                _ => None,
            };
            attrs.push(Attribute {
                keyword: keyword.to_string(),
                value,
            });
            i += 1;
        }
        Ok(Term::Annot(alloc::boxed::Box::new(inner), attrs))
    }

    fn let_term(&mut self, e: &SExpr, items: &[SExpr]) -> Result<Term, FrontendError> {
        let [_, bindings, body] = items else {
            return Err(malformed(e.pos, "malformed let"));
        };
        let bindings = bindings.as_list().ok_or_else(|| malformed(bindings.pos, "malformed let bindings"))?;
        let mut bound = Vec::new();
        for b in bindings {
            match b.as_list() {
                Some([n, t]) => {
                    let name = n.as_symbol().ok_or_else(|| malformed(n.pos, "expected a variable"))?;
                    bound.push((name.to_string(), self.term(t)?));
                }
                _ => return Err(malformed(b.pos, "malformed let binding")),
            }
        }
        let depth = self.locals.len();
        self.locals.extend(bound.iter().map(|(n, t)| (n.clone(), t.sort())));
        let body = self.term(body);
        self.locals.truncate(depth);
        Ok(Term::Let(bound, alloc::boxed::Box::new(body?)))
    }

    fn quantifier(&mut self, e: &SExpr, q: Quantifier, items: &[SExpr]) -> Result<Term, FrontendError> {
        let [_, vars, body] = items else {
            return Err(malformed(e.pos, "malformed quantifier"));
        };
        let vars = vars.as_list().ok_or_else(|| malformed(vars.pos, "malformed sorted variables"))?;
        if vars.is_empty() {
            return Err(malformed(e.pos, "quantifier without variables"));
        }
        let mut bound = Vec::new();
        for v in vars {
            match v.as_list() {
                Some([n, s]) => {
                    let name = n.as_symbol().ok_or_else(|| malformed(n.pos, "expected a variable"))?;
                    let sort = self.symtab.resolve_sort(&Sort::from_sexpr(s)?, s.pos)?;
                    bound.push((name.to_string(), sort));
                }
                _ => return Err(malformed(v.pos, "malformed sorted variable")),
            }
        }
        let depth = self.locals.len();
        self.locals.extend(bound.iter().cloned());
        let body_term = self.term(body);
        self.locals.truncate(depth);
        let body_term = body_term?;
        if !body_term.sort().is_bool() {
            return Err(FrontendError::SortMismatch {
                symbol: if q == Quantifier::Forall { "forall" } else { "exists" }.to_string(),
                expected: "Bool".to_string(),
                found: format!("{}", body_term.sort()),
                pos: body.pos,
            });
        }
        Ok(Term::Quant(q, bound, alloc::boxed::Box::new(body_term)))
    }
}

/// Inlines every macro application. Annotations inside macro bodies are
/// dropped.
pub fn expand_defines(t: &Term, symtab: &SymbolTable) -> Result<Term, FrontendError> {
    let mut cx = Expander {
        symtab,
        stack: Vec::new(),
        cache: BTreeMap::new(),
    };
    cx.expand(t)
}

struct Expander<'a> {
    symtab: &'a SymbolTable,
    stack: Vec<String>,
    cache: BTreeMap<String, Term>,
}

impl Expander<'_> {
    fn expand(&mut self, t: &Term) -> Result<Term, FrontendError> {
        Ok(match t {
            Term::Var(..) | Term::Const(_) => t.clone(),
            Term::App(Op::Macro(name), args, _) => {
                let args = args.iter().map(|a| self.expand(a)).collect::<Result<Vec<_>, _>>()?;
                let def = match self.symtab.get(name) {
                    Some(Decl::Macro(d)) => d,
                    _ => {
                        return Err(FrontendError::UnknownSymbol {
                            name: name.clone(),
                            pos: Pos::default(),
                        })
                    }
                };
                if self.stack.iter().any(|n| n == name) {
                    return Err(FrontendError::RecursiveDefinition {
                        name: name.clone(),
                        pos: def.pos,
                    });
                }
                let body = match self.cache.get(name) {
                    Some(b) => b.clone(),
                    None => {
                        self.stack.push(name.clone());
                        let b = self.expand(&def.body)?.strip_annotations();
                        self.stack.pop();
                        self.cache.insert(name.clone(), b.clone());
                        b
                    }
                };
                if def.params.is_empty() {
                    body
                } else {
                    let params = &def.params;
                    body.substitute(&|n, _| params.iter().position(|(p, _)| p == n).map(|i| args[i].clone()))
                }
            }
            Term::App(op, args, s) => Term::App(
                op.clone(),
                args.iter().map(|a| self.expand(a)).collect::<Result<_, _>>()?,
                s.clone(),
            ),
            Term::Let(bs, body) => Term::Let(
                bs.iter()
                    .map(|(n, v)| Ok((n.clone(), self.expand(v)?)))
                    .collect::<Result<_, FrontendError>>()?,
                alloc::boxed::Box::new(self.expand(body)?),
            ),
            Term::Quant(q, vs, body) => Term::Quant(*q, vs.clone(), alloc::boxed::Box::new(self.expand(body)?)),
            Term::Annot(inner, attrs) => Term::Annot(alloc::boxed::Box::new(self.expand(inner)?), attrs.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_script;
    use alloc::string::ToString;
    use alloc::vec;

    fn elab(text: &str) -> Result<Elaborated, FrontendError> {
        elaborate(&parse_script(text).unwrap())
    }

    #[test]
    fn invar_property_keeps_annotation() {
        let e = elab("(declare-fun x () Int)\n(define-fun p1 () Bool (! (> x 0) :invar-property 1))").unwrap();
        let d = &e.definitions[0];
        assert_eq!(d.body.sort(), Sort::Bool);
        match &d.body {
            Term::Annot(inner, attrs) => {
                assert_eq!(inner.to_string(), "(> x 0)");
                assert_eq!(attrs[0].keyword, "invar-property");
                assert_eq!(attrs[0].value.as_ref().unwrap().as_numeral(), Some("1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn declared_sort_clash() {
        let err = elab("(declare-fun x () Int)\n(define-fun f () Int (> x 0))").unwrap_err();
        match err {
            FrontendError::SortMismatch {
                symbol, expected, found, ..
            } => {
                assert_eq!(symbol, "f");
                assert_eq!(expected, "Int");
                assert_eq!(found, "Bool");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_symbol() {
        let err = elab("(define-fun g () Bool (= y 1))").unwrap_err();
        assert!(matches!(err, FrontendError::UnknownSymbol { ref name, .. } if name == "y"), "{err:?}");
    }

    #[test]
    fn self_reference_is_recursive() {
        let err = elab("(define-fun f () Bool f)").unwrap_err();
        assert!(matches!(err, FrontendError::RecursiveDefinition { ref name, .. } if name == "f"));
    }

    #[test]
    fn expansion_of_property_macro() {
        let e = elab(
            "(declare-fun x () Int)\n(define-fun p1 () Bool (! (> x 0) :invar-property 1))\n(define-fun q () Bool (and p1 p1))",
        )
        .unwrap();
        let q = Term::App(Op::Macro("p1".into()), vec![], Sort::Bool);
        assert_eq!(expand_defines(&q, &e.symtab).unwrap().to_string(), "(> x 0)");
        let and = &e.definitions[1].body;
        assert_eq!(expand_defines(and, &e.symtab).unwrap().to_string(), "(and (> x 0) (> x 0))");
    }

    #[test]
    fn expansion_without_macros_is_identity() {
        let e = elab("(declare-fun x () Int)\n(define-fun a () Bool (let ((y (+ x 1))) (> y 0)))").unwrap();
        let body = &e.definitions[0].body;
        assert_eq!(&expand_defines(body, &e.symtab).unwrap(), body);
    }

    #[test]
    fn parametric_macro_substitutes_arguments() {
        let e = elab("(declare-fun x () Int)\n(define-fun inc ((a Int)) Int (+ a 1))\n(define-fun t () Bool (= (inc x) 2))")
            .unwrap();
        let t = expand_defines(&e.definitions[1].body, &e.symtab).unwrap();
        assert_eq!(t.to_string(), "(= (+ x 1) 2)");
    }

    #[test]
    fn recursion_through_symbol_table_is_detected() {
        let mut st = SymbolTable::new();
        st.define(Definition {
            name: "f".into(),
            params: vec![],
            result: Sort::Bool,
            body: Term::App(Op::Macro("f".into()), vec![], Sort::Bool),
            pos: Pos::new(1, 1),
        })
        .unwrap();
        let t = Term::App(Op::Macro("f".into()), vec![], Sort::Bool);
        assert!(matches!(expand_defines(&t, &st), Err(FrontendError::RecursiveDefinition { .. })));
    }

    #[test]
    fn duplicate_declaration() {
        let err = elab("(declare-fun x () Int)\n(declare-const x Bool)").unwrap_err();
        assert_eq!(
            err,
            FrontendError::DuplicateDeclaration {
                name: "x".into(),
                pos: Pos::new(2, 1)
            }
        );
    }

    #[test]
    fn bitvector_and_array_terms() {
        let e = elab(
            "(declare-fun c () (_ BitVec 4))\n(declare-fun m () (Array (_ BitVec 2) Bool))\n\
             (define-fun a () Bool (and (bvult c #b1111) (= ((_ extract 1 0) c) (_ bv2 2)) (select m #b01)))\n\
             (define-fun k () (Array (_ BitVec 2) Bool) ((as const (Array (_ BitVec 2) Bool)) false))",
        )
        .unwrap();
        assert_eq!(
            e.definitions[0].body.to_string(),
            "(and (bvult c #b1111) (= ((_ extract 1 0) c) #b10) (select m #b01))"
        );
        assert_eq!(e.definitions[1].body.to_string(), "((as const (Array (_ BitVec 2) Bool)) false)");
    }

    #[test]
    fn sort_aliases_resolve() {
        let e = elab("(define-sort Word () (_ BitVec 8))\n(declare-fun w () Word)\n(define-fun z () Bool (= w #x00))").unwrap();
        assert!(e.warnings.is_empty());
        assert!(matches!(e.symtab.get("w"), Some(Decl::Fun { result: Sort::BitVec(8), .. })));
        let e = elab("(define-sort Arr (X) (Array X X))\n(declare-fun a () (Arr Int))").unwrap();
        assert_eq!(e.warnings.len(), 1);
        assert!(matches!(e.symtab.get("a"), Some(Decl::Fun { result: Sort::Array(..), .. })));
    }

    #[test]
    fn unknown_sort() {
        assert!(matches!(elab("(declare-fun u () U)"), Err(FrontendError::UnknownSort { .. })));
        assert!(elab("(declare-sort U 0)\n(declare-fun u () U)\n(declare-fun f (U) Bool)").is_ok());
    }

    #[test]
    fn int_literals_coerce_in_real_context() {
        let e = elab("(declare-fun r () Real)\n(define-fun a () Bool (> r 0))\n(define-fun b () Real (/ 1 3))").unwrap();
        assert_eq!(e.definitions[0].body.to_string(), "(> r 0.0)");
        assert_eq!(e.definitions[1].body.to_string(), "(/ 1.0 3.0)");
    }

    #[test]
    fn quantifiers_elaborate() {
        let e = elab("(declare-fun f (Int) Int)\n(define-fun a () Bool (forall ((i Int)) (> (f i) 0)))").unwrap();
        assert!(e.definitions[0].body.has_quantifier());
        assert_eq!(e.definitions[0].body.to_string(), "(forall ((i Int)) (> (f i) 0))");
    }
}
