//! BTOR2 word-level model checking format.
//!
//! Booleans are bit-vectors of width one. When a VMT transition relation is
//! not a set of next-state assignments, the relation is kept exact by
//! reading next-state values from fresh inputs and tracking in an extra
//! state bit whether every transition taken so far satisfied the relation.
//! Initial conditions that are not per-variable constants are enforced by a
//! constraint guarded by a first-step flag.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{conjuncts, ConvertError};
use crate::model::{fresh_name, PropertyKind, PropertySpec, StateVar, TransitionSystem, VmtDocument};
use crate::sort::Sort;
use crate::term::{bv_mask, BvConst, Constant, Op, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum BSort {
    Bv(u32),
    Array(Box<BSort>, Box<BSort>),
}

impl BSort {
    fn of(s: &Sort) -> Result<BSort, ConvertError> {
        match s {
            Sort::Bool => Ok(BSort::Bv(1)),
            Sort::BitVec(w) => Ok(BSort::Bv(*w)),
            Sort::Array(i, e) => Ok(BSort::Array(Box::new(BSort::of(i)?), Box::new(BSort::of(e)?))),
            other => Err(ConvertError::UnsupportedSort(format!("{}", other))),
        }
    }

    /// The VMT sort for this BTOR2 sort; width one reads as Bool.
    fn to_sort(&self) -> Sort {
        match self {
            BSort::Bv(1) => Sort::Bool,
            BSort::Bv(w) => Sort::BitVec(*w),
            BSort::Array(i, e) => Sort::array(i.to_sort(), e.to_sort()),
        }
    }

    fn width(&self) -> u32 {
        match self {
            BSort::Bv(w) => *w,
            BSort::Array(..) => 0,
        }
    }
}

struct Writer {
    lines: Vec<String>,
    sorts: BTreeMap<BSort, u64>,
    nodes: BTreeMap<String, u64>,
    consts: BTreeMap<u64, BvConst>,
    node_sorts: BTreeMap<u64, BSort>,
    vars: BTreeMap<String, u64>,
    cache: BTreeMap<Term, u64>,
}

impl Writer {
    fn new() -> Self {
        Writer {
            lines: Vec::new(),
            sorts: BTreeMap::new(),
            nodes: BTreeMap::new(),
            consts: BTreeMap::new(),
            node_sorts: BTreeMap::new(),
            vars: BTreeMap::new(),
            cache: BTreeMap::new(),
        }
    }

    fn line(&mut self, body: String) -> u64 {
        let id = self.lines.len() as u64 + 1;
        self.lines.push(format!("{} {}", id, body));
        id
    }

    fn sort(&mut self, s: &BSort) -> u64 {
        if let Some(id) = self.sorts.get(s) {
            return *id;
        }
        let body = match s {
            BSort::Bv(w) => format!("sort bitvec {}", w),
            BSort::Array(i, e) => {
                let (i, e) = (self.sort(i), self.sort(e));
                format!("sort array {} {}", i, e)
            }
        };
        let id = self.line(body);
        self.sorts.insert(s.clone(), id);
        id
    }

    /// A hash-consed operator node.
    fn node(&mut self, op: &str, s: &BSort, args: &[u64], params: &[u128]) -> u64 {
        let sid = self.sort(s);
        let mut body = format!("{} {}", op, sid);
        for a in args {
            body.push_str(&format!(" {}", a));
        }
        for p in params {
            body.push_str(&format!(" {}", p));
        }
        if let Some(id) = self.nodes.get(&body) {
            return *id;
        }
        let id = self.line(body.clone());
        self.nodes.insert(body, id);
        self.node_sorts.insert(id, s.clone());
        id
    }

    fn named(&mut self, kind: &str, s: &BSort, name: &str) -> u64 {
        let sid = self.sort(s);
        let id = self.line(format!("{} {} {}", kind, sid, name));
        self.node_sorts.insert(id, s.clone());
        id
    }

    fn constant(&mut self, c: BvConst) -> u64 {
        let id = self.node("constd", &BSort::Bv(c.width), &[], &[c.value]);
        self.consts.insert(id, c);
        id
    }

    fn bit(&mut self, b: bool) -> u64 {
        self.constant(BvConst::new(1, b as u128))
    }

    fn sort_of(&self, id: u64) -> BSort {
        self.node_sorts[&id].clone()
    }

    fn not(&mut self, a: u64) -> u64 {
        if let Some(c) = self.consts.get(&a).copied() {
            return self.constant(BvConst::new(c.width, !c.value));
        }
        let s = self.sort_of(a);
        self.node("not", &s, &[a], &[])
    }

    /// Bit-level `and`/`or` with constant operands folded away.
    fn junction(&mut self, op: &str, args: &[u64]) -> u64 {
        let unit = op == "and";
        let mut kept = Vec::new();
        for &a in args {
            match self.consts.get(&a) {
                Some(c) if (c.value == 1) == unit => {}
                Some(_) => return self.bit(!unit),
                None => kept.push(a),
            }
        }
        let Some(mut acc) = kept.first().copied() else {
            return self.bit(unit);
        };
        for &a in &kept[1..] {
            acc = self.node(op, &BSort::Bv(1), &[acc, a], &[]);
        }
        acc
    }

    fn fold(&mut self, op: &str, s: &BSort, args: &[u64]) -> u64 {
        let mut acc = args[0];
        for &a in &args[1..] {
            acc = self.node(op, s, &[acc, a], &[]);
        }
        acc
    }

    fn term(&mut self, t: &Term) -> Result<u64, ConvertError> {
        if let Some(id) = self.cache.get(t) {
            return Ok(*id);
        }
        let id = self.term_uncached(t)?;
        self.cache.insert(t.clone(), id);
        Ok(id)
    }

    fn term_uncached(&mut self, t: &Term) -> Result<u64, ConvertError> {
        match t {
            Term::Var(n, _) => self.vars.get(n).copied().ok_or_else(|| ConvertError::UnsupportedSymbol(n.clone())),
            Term::Const(Constant::Bool(b)) => Ok(self.bit(*b)),
            Term::Const(Constant::BitVec(c)) => Ok(self.constant(*c)),
            Term::Const(c) => Err(ConvertError::UnsupportedSort(format!("{}", c.sort()))),
            Term::Annot(inner, _) => self.term(inner),
            Term::Let(..) => self.term(&t.inline_lets()),
            Term::Quant(..) => Err(ConvertError::QuantifiedSystem),
            Term::App(op, args, sort) => {
                let s = BSort::of(sort)?;
                let a: Vec<u64> = args.iter().map(|x| self.term(x)).collect::<Result<_, _>>()?;
                self.app(op, args, &a, &s)
            }
        }
    }

    fn app(&mut self, op: &Op, args: &[Term], a: &[u64], s: &BSort) -> Result<u64, ConvertError> {
        let bit = BSort::Bv(1);
        let pairs = |a: &[u64]| -> Vec<(u64, u64)> {
            let mut out = Vec::new();
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    out.push((a[i], a[j]));
                }
            }
            out
        };
        Ok(match op {
            Op::Not | Op::BvNot => self.not(a[0]),
            Op::And => self.junction("and", a),
            Op::Or => self.junction("or", a),
            Op::Xor => self.fold("xor", &bit, a),
            Op::Implies => {
                let mut acc = a[a.len() - 1];
                for &x in a[..a.len() - 1].iter().rev() {
                    acc = self.node("implies", &bit, &[x, acc], &[]);
                }
                acc
            }
            Op::Eq | Op::Distinct => {
                let rel = if *op == Op::Eq { "eq" } else { "neq" };
                let parts: Vec<u64> = pairs(a).into_iter().map(|(x, y)| self.node(rel, &bit, &[x, y], &[])).collect();
                self.junction("and", &parts)
            }
            Op::Ite => {
                if let Some(c) = self.consts.get(&a[0]) {
                    return Ok(if c.value == 1 { a[1] } else { a[2] });
                }
                self.node("ite", s, a, &[])
            }
            Op::Concat => {
                let mut acc = a[0];
                let mut w = args[0].sort().bv_width().unwrap_or(1);
                for (x, t) in a[1..].iter().zip(&args[1..]) {
                    w += t.sort().bv_width().unwrap_or(1);
                    acc = self.node("concat", &BSort::Bv(w), &[acc, *x], &[]);
                }
                acc
            }
            Op::Repeat(n) => {
                let w = s.width() / n;
                let mut acc = a[0];
                for k in 2..=*n {
                    acc = self.node("concat", &BSort::Bv(w * k), &[acc, a[0]], &[]);
                }
                acc
            }
            Op::Extract(i, j) => self.node("slice", s, a, &[*i as u128, *j as u128]),
            Op::ZeroExtend(0) | Op::SignExtend(0) => a[0],
            Op::ZeroExtend(n) => self.node("uext", s, a, &[*n as u128]),
            Op::SignExtend(n) => self.node("sext", s, a, &[*n as u128]),
            Op::RotateLeft(n) | Op::RotateRight(n) => {
                let w = s.width();
                if n % w == 0 {
                    return Ok(a[0]);
                }
                let amount = self.constant(BvConst::new(w, (n % w) as u128));
                let name = if matches!(op, Op::RotateLeft(_)) { "rol" } else { "ror" };
                self.node(name, s, &[a[0], amount], &[])
            }
            Op::BvComp => self.node("eq", &bit, a, &[]),
            Op::Select => self.node("read", s, a, &[]),
            Op::Store => self.node("write", s, a, &[]),
            Op::BvNand | Op::BvNor | Op::BvXnor => {
                let name = match op {
                    Op::BvNand => "nand",
                    Op::BvNor => "nor",
                    _ => "xnor",
                };
                self.node(name, s, a, &[])
            }
            _ => {
                let Some(name) = bv_op_name(op) else {
                    return Err(ConvertError::UnsupportedSymbol(format!("{}", op)));
                };
                if a.len() == 1 {
                    self.node(name, s, a, &[])
                } else {
                    self.fold(name, s, a)
                }
            }
        })
    }
}

fn bv_op_name(op: &Op) -> Option<&'static str> {
    Some(match op {
        Op::BvAnd => "and",
        Op::BvOr => "or",
        Op::BvXor => "xor",
        Op::BvNeg => "neg",
        Op::BvAdd => "add",
        Op::BvSub => "sub",
        Op::BvMul => "mul",
        Op::BvUdiv => "udiv",
        Op::BvUrem => "urem",
        Op::BvSdiv => "sdiv",
        Op::BvSrem => "srem",
        Op::BvSmod => "smod",
        Op::BvShl => "sll",
        Op::BvLshr => "srl",
        Op::BvAshr => "sra",
        Op::BvUlt => "ult",
        Op::BvUle => "ulte",
        Op::BvUgt => "ugt",
        Op::BvUge => "ugte",
        Op::BvSlt => "slt",
        Op::BvSle => "slte",
        Op::BvSgt => "sgt",
        Op::BvSge => "sgte",
        _ => return None,
    })
}

/// Per-variable initial values, when the initial condition has that shape.
fn simple_init(sys: &TransitionSystem, init: &Term) -> Option<Vec<(usize, Term)>> {
    let mut parts = Vec::new();
    conjuncts(init, &mut parts);
    let mut out: Vec<(usize, Term)> = Vec::new();
    let state = |t: &Term| t.as_var().and_then(|n| sys.states.iter().position(|s| s.current == n));
    for p in parts {
        let (idx, value) = match &p {
            Term::Var(..) => (state(&p)?, Term::tt()),
            Term::App(Op::Not, a, _) => (state(&a[0])?, Term::ff()),
            Term::App(Op::Eq, a, _) if a.len() == 2 => match (state(&a[0]), state(&a[1])) {
                (Some(i), _) if a[1].free_vars().is_empty() => (i, a[1].clone()),
                (_, Some(i)) if a[0].free_vars().is_empty() => (i, a[0].clone()),
                _ => return None,
            },
            _ => return None,
        };
        let mut applied = BTreeSet::new();
        value.applied_symbols(&mut applied);
        if !applied.is_empty() || out.iter().any(|(i, _)| *i == idx) {
            return None;
        }
        out.push((idx, value));
    }
    Some(out)
}

/// Next-state assignments `x' = e(X, Y)`, when the relation has that shape.
fn functional_trans(sys: &TransitionSystem, trans: &Term) -> Option<BTreeMap<usize, Term>> {
    let mut parts = Vec::new();
    conjuncts(trans, &mut parts);
    let next = |t: &Term| t.as_var().and_then(|n| sys.states.iter().position(|s| s.next == n));
    let next_free = |t: &Term| t.free_vars().iter().all(|n| sys.state_by_next(n).is_none());
    let mut out = BTreeMap::new();
    for p in parts {
        let (idx, value) = match &p {
            Term::Var(..) => (next(&p)?, Term::tt()),
            Term::App(Op::Not, a, _) => (next(&a[0])?, Term::ff()),
            Term::App(Op::Eq, a, _) if a.len() == 2 => match (next(&a[0]), next(&a[1])) {
                (Some(i), _) if next_free(&a[1]) => (i, a[1].clone()),
                (_, Some(i)) if next_free(&a[0]) => (i, a[0].clone()),
                _ => return None,
            },
            _ => return None,
        };
        if out.insert(idx, value).is_some() {
            return None;
        }
    }
    Some(out)
}

fn btor_name(name: &str) -> String {
    name.chars().map(|c| if c.is_whitespace() || c == ';' { '_' } else { c }).collect()
}

/// Translates every invariant property into a `bad` line.
pub fn vmt_to_btor(doc: &VmtDocument) -> Result<String, ConvertError> {
    if let Some(p) = doc.properties.iter().find(|p| p.kind == PropertyKind::Live) {
        return Err(ConvertError::LivePropertyUnsupported(p.index));
    }
    if let Some(f) = doc.functions.first() {
        return Err(ConvertError::UnsupportedSymbol(f.name.clone()));
    }
    let sys = &doc.system;
    for s in &sys.states {
        BSort::of(&s.sort)?;
    }
    for (_, s) in &sys.inputs {
        BSort::of(s)?;
    }
    let init = sys.init.inline_lets().strip_annotations();
    let trans = sys.trans.inline_lets().strip_annotations();
    if init.has_quantifier() || trans.has_quantifier() || doc.properties.iter().any(|p| p.formula.has_quantifier()) {
        return Err(ConvertError::QuantifiedSystem);
    }
    let init_values = simple_init(sys, &init);
    let assignments = functional_trans(sys, &trans);

    let mut taken = doc.declared_names();
    let mut w = Writer::new();
    let bit = BSort::Bv(1);
    let mut state_ids = Vec::new();
    for s in &sys.states {
        let id = w.named("state", &BSort::of(&s.sort)?, &btor_name(&s.current));
        w.vars.insert(s.current.clone(), id);
        state_ids.push(id);
    }
    let first = match init_values {
        None => Some(w.named("state", &bit, &fresh_name("init.flag", &mut taken))),
        Some(_) => None,
    };
    let ok = match assignments {
        None => Some(w.named("state", &bit, &fresh_name("trans.ok", &mut taken))),
        Some(_) => None,
    };
    for (n, s) in &sys.inputs {
        let id = w.named("input", &BSort::of(s)?, &btor_name(n));
        w.vars.insert(n.clone(), id);
    }
    let mut next_inputs = BTreeMap::new();
    for (i, s) in sys.states.iter().enumerate() {
        if assignments.as_ref().is_none_or(|a| !a.contains_key(&i)) {
            let id = w.named("input", &BSort::of(&s.sort)?, &btor_name(&s.next));
            w.vars.insert(s.next.clone(), id);
            next_inputs.insert(i, id);
        }
    }

    if let Some(values) = &init_values {
        for (i, v) in values {
            let s = &sys.states[*i];
            let sort = BSort::of(&s.sort)?;
            let value = match v {
                Term::App(Op::ConstArray(_), elem, _) => w.term(&elem[0])?,
                v => w.term(v)?,
            };
            let sid = w.sort(&sort);
            w.line(format!("init {} {} {}", sid, state_ids[*i], value));
        }
    }
    let sid = w.sort(&bit);
    for flag in [first, ok].into_iter().flatten() {
        let one = w.bit(true);
        w.line(format!("init {} {} {}", sid, flag, one));
    }

    for (i, s) in sys.states.iter().enumerate() {
        let value = match (&assignments, next_inputs.get(&i)) {
            (_, Some(input)) => *input,
            (Some(a), None) => w.term(&a[&i])?,
            (None, None) => unreachable!("every state reads its next value from an input"),
        };
        let sid = w.sort(&BSort::of(&s.sort)?);
        w.line(format!("next {} {} {}", sid, state_ids[i], value));
    }
    if let Some(flag) = first {
        let zero = w.bit(false);
        w.line(format!("next {} {} {}", sid, flag, zero));
    }
    if let Some(ok) = ok {
        let t = w.term(&trans)?;
        let still = w.junction("and", &[ok, t]);
        w.line(format!("next {} {} {}", sid, ok, still));
    }

    if let Some(flag) = first {
        let i = w.term(&init)?;
        let guarded = w.node("implies", &bit, &[flag, i], &[]);
        w.line(format!("constraint {}", guarded));
    }
    for p in &doc.properties {
        let b = w.term(&Term::not(p.formula.inline_lets().strip_annotations()))?;
        let b = match ok {
            Some(ok) => w.junction("and", &[ok, b]),
            None => b,
        };
        w.line(format!("bad {}", b));
    }

    let mut out = String::new();
    for l in &w.lines {
        out.push_str(l);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Node {
    Sort(BSort),
    Expr(Term),
    /// init/next/constraint/bad and other lines that cannot be referenced.
    Other,
}

struct StateDecl {
    name: String,
    sort: Sort,
    init: Option<Term>,
    next: Option<Term>,
}

struct Reader<'a> {
    line: usize,
    tokens: Vec<&'a str>,
    nodes: &'a BTreeMap<u64, Node>,
}

impl Reader<'_> {
    fn malformed(&self, reason: impl Into<String>) -> ConvertError {
        ConvertError::MalformedBtor { line: self.line, reason: reason.into() }
    }

    fn token(&self, i: usize) -> Result<&str, ConvertError> {
        self.tokens.get(i).copied().ok_or_else(|| self.malformed(format!("`{}` needs more operands", self.tokens[1])))
    }

    fn num(&self, i: usize) -> Result<u64, ConvertError> {
        let t = self.token(i)?;
        t.parse().map_err(|_| self.malformed(format!("expected a number, found `{}`", t)))
    }

    fn lookup(&self, id: u64) -> Result<&Node, ConvertError> {
        self.nodes.get(&id).ok_or_else(|| self.malformed(format!("reference to undefined node {}", id)))
    }

    fn sort(&self, i: usize) -> Result<BSort, ConvertError> {
        match self.lookup(self.num(i)?)? {
            Node::Sort(s) => Ok(s.clone()),
            _ => Err(self.malformed(format!("node {} is not a sort", self.num(i)?))),
        }
    }

    /// An operand; a negative id denotes the bitwise negation of the node.
    fn expr(&self, i: usize) -> Result<Term, ConvertError> {
        let t = self.token(i)?;
        let (neg, digits) = match t.strip_prefix('-') {
            Some(d) => (true, d),
            None => (false, t),
        };
        let id: u64 = digits.parse().map_err(|_| self.malformed(format!("expected a node id, found `{}`", t)))?;
        match self.lookup(id)? {
            Node::Expr(e) if neg => Ok(negate(e.clone())),
            Node::Expr(e) => Ok(e.clone()),
            _ => Err(self.malformed(format!("node {} is not an expression", id))),
        }
    }
}

fn negate(t: Term) -> Term {
    if t.sort().is_bool() {
        Term::not(t)
    } else {
        Term::mk(Op::BvNot, vec![t])
    }
}

/// Bit-vector view of a term; Booleans become `#b1`/`#b0`.
fn as_bv(t: Term) -> Term {
    match t.sort() {
        Sort::Bool => Term::ite(t, Term::bv(1, 1), Term::bv(1, 0)),
        _ => t,
    }
}

/// Inverse of [`as_bv`] for results of width one.
fn from_bv(t: Term) -> Term {
    match (&t, t.sort()) {
        (Term::Const(Constant::BitVec(c)), Sort::BitVec(1)) => Term::bool(c.value == 1),
        (_, Sort::BitVec(1)) => Term::eq(t, Term::bv(1, 1)),
        _ => t,
    }
}

fn parse_constant(kind: &str, text: &str, width: u32) -> Option<u128> {
    let mask = bv_mask(width);
    let value = match kind {
        "const" => {
            if text.len() != width as usize {
                return None;
            }
            u128::from_str_radix(text, 2).ok()?
        }
        "consth" => u128::from_str_radix(text, 16).ok()?,
        _ => match text.strip_prefix('-') {
            Some(d) => d.parse::<u128>().ok()?.wrapping_neg(),
            None => text.parse::<u128>().ok()?,
        },
    };
    if kind != "constd" && value & !mask != 0 {
        return None;
    }
    Some(value & mask)
}

/// Reads a BTOR2 model. `bad` lines become invariant properties numbered
/// from 0; `constraint` lines are assumed in every reached state.
pub fn btor_to_vmt(text: &str) -> Result<VmtDocument, ConvertError> {
    let mut nodes: BTreeMap<u64, Node> = BTreeMap::new();
    let mut states: Vec<StateDecl> = Vec::new();
    let mut state_of: BTreeMap<u64, usize> = BTreeMap::new();
    let mut inputs: Vec<(String, Sort)> = Vec::new();
    let mut constraints = Vec::new();
    let mut bads = Vec::new();
    let mut taken = BTreeSet::new();
    let mut last_id = 0u64;
    let mut arrays = false;

    for (ln, raw) in text.lines().enumerate() {
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let line = ln + 1;
        let malformed = |reason: String| ConvertError::MalformedBtor { line, reason };
        let id: u64 = tokens[0].parse().map_err(|_| malformed(format!("expected a node id, found `{}`", tokens[0])))?;
        if id <= last_id {
            return Err(malformed(format!("node id {} does not increase", id)));
        }
        last_id = id;
        let Some(&kind) = tokens.get(1) else {
            return Err(malformed("missing operator".into()));
        };
        let r = Reader { line, tokens: tokens.clone(), nodes: &nodes };
        let node = match kind {
            "sort" => match r.token(2)? {
                "bitvec" => {
                    let w = r.num(3)?;
                    if w == 0 || w > u32::MAX as u64 {
                        return Err(malformed(format!("invalid width {}", w)));
                    }
                    Node::Sort(BSort::Bv(w as u32))
                }
                "array" => {
                    arrays = true;
                    Node::Sort(BSort::Array(Box::new(r.sort(3)?), Box::new(r.sort(4)?)))
                }
                other => return Err(malformed(format!("unknown sort kind `{}`", other))),
            },
            "state" | "input" => {
                let sort = r.sort(2)?.to_sort();
                let fallback = format!("{}{}", if kind == "state" { "s" } else { "i" }, id);
                let base: String = tokens
                    .get(3)
                    .map(|s| s.chars().map(|c| if c == '|' || c == '\\' { '_' } else { c }).collect())
                    .unwrap_or(fallback);
                let name = fresh_name(&base, &mut taken);
                if kind == "state" {
                    state_of.insert(id, states.len());
                    states.push(StateDecl { name: name.clone(), sort: sort.clone(), init: None, next: None });
                } else {
                    inputs.push((name.clone(), sort.clone()));
                }
                Node::Expr(Term::Var(name, sort))
            }
            "const" | "constd" | "consth" | "zero" | "one" | "ones" => {
                let s = r.sort(2)?;
                let BSort::Bv(width) = s else {
                    return Err(malformed("constant of array sort".into()));
                };
                if width > 128 {
                    return Err(ConvertError::UnsupportedNode(format!("{} wider than 128 bits", kind)));
                }
                let value = match kind {
                    "zero" => 0,
                    "one" => 1,
                    "ones" => bv_mask(width),
                    _ => parse_constant(kind, r.token(3)?, width)
                        .ok_or_else(|| malformed(format!("invalid {} value for width {}", kind, width)))?,
                };
                Node::Expr(from_bv(Term::bv(width, value)))
            }
            "init" | "next" => {
                let s = r.sort(2)?;
                let sid = r.num(3)?;
                let idx = *state_of.get(&sid).ok_or_else(|| malformed(format!("node {} is not a state", sid)))?;
                let mut value = r.expr(4)?;
                let target = s.to_sort();
                if target != states[idx].sort {
                    return Err(malformed(format!("sort mismatch for state {}", sid)));
                }
                if let (true, Sort::Array(_, e)) = (kind == "init", &target) {
                    if value.sort() == **e {
                        value = Term::mk(Op::ConstArray(target.clone()), vec![value]);
                    }
                }
                if value.sort() != target {
                    return Err(malformed(format!("sort mismatch for state {}", sid)));
                }
                let slot = if kind == "init" { &mut states[idx].init } else { &mut states[idx].next };
                if slot.replace(value).is_some() {
                    return Err(malformed(format!("second `{}` for state {}", kind, sid)));
                }
                Node::Other
            }
            "constraint" | "bad" => {
                let e = r.expr(2)?;
                if !e.sort().is_bool() {
                    return Err(malformed(format!("`{}` needs a width-one operand", kind)));
                }
                if kind == "bad" {
                    bads.push(e);
                } else {
                    constraints.push(e);
                }
                Node::Other
            }
            "output" | "justice" | "fair" => return Err(ConvertError::UnsupportedNode(kind.to_string())),
            _ => {
                let s = r.sort(2)?;
                let t = operator(&r, kind)?;
                if t.sort() != s.to_sort() {
                    return Err(malformed(format!("`{}` result does not have the declared sort", kind)));
                }
                Node::Expr(t)
            }
        };
        nodes.insert(id, node);
    }

    let input_names: BTreeSet<&str> = inputs.iter().map(|(n, _)| n.as_str()).collect();
    let uses_inputs = |t: &Term| t.free_vars().iter().any(|n| input_names.contains(n.as_str()));
    let mut sys = TransitionSystem { states: Vec::new(), inputs: inputs.clone(), init: Term::tt(), trans: Term::tt() };
    let mut init = Vec::new();
    let mut trans = Vec::new();
    for s in &states {
        let next = fresh_name(&format!("{}.next", s.name), &mut taken);
        let cur = Term::Var(s.name.clone(), s.sort.clone());
        let nxt = Term::Var(next.clone(), s.sort.clone());
        if let Some(v) = &s.init {
            if uses_inputs(v) {
                return Err(ConvertError::UnsupportedNode(format!("init of `{}` depending on inputs", s.name)));
            }
            init.push(equate(cur.clone(), v.clone()));
        }
        trans.push(equate(nxt, s.next.clone().unwrap_or(cur)));
        sys.states.push(StateVar { current: s.name.clone(), next, sort: s.sort.clone() });
    }
    for c in &constraints {
        if uses_inputs(c) {
            trans.push(c.clone());
        } else {
            init.push(c.clone());
            trans.push(c.clone());
            trans.push(sys.prime(c).expect("constraint over current states only"));
        }
    }
    sys.init = Term::and(init);
    sys.trans = Term::and(trans);

    let mut doc = VmtDocument::empty();
    doc.logic = Some(if arrays { "QF_ABV" } else { "QF_BV" }.to_string());
    for (i, b) in bads.into_iter().enumerate() {
        if uses_inputs(&b) {
            return Err(ConvertError::UnsupportedNode("bad depending on inputs".into()));
        }
        doc.properties.push(PropertySpec { kind: PropertyKind::Invariant, index: i as u64, formula: Term::not(b) });
    }
    doc.system = sys;
    Ok(doc)
}

fn equate(a: Term, b: Term) -> Term {
    if a.sort().is_bool() {
        Term::iff(a, b)
    } else {
        Term::eq(a, b)
    }
}

fn operator(r: &Reader<'_>, kind: &str) -> Result<Term, ConvertError> {
    let mk = |op: Op, args: Vec<Term>| {
        Term::app(op, args).map_err(|e| r.malformed(format!("`{}` expects {}, found {}", kind, e.expected, e.found)))
    };
    let bv1 = |op: Op, args: Vec<Term>| mk(op, args.into_iter().map(as_bv).collect()).map(from_bv);
    let logical = |bool_op: Op, word_op: Op| -> Result<Term, ConvertError> {
        let (a, b) = (r.expr(3)?, r.expr(4)?);
        if a.sort().is_bool() && b.sort().is_bool() {
            mk(bool_op, vec![a, b])
        } else {
            mk(word_op, vec![a, b])
        }
    };
    let width = |t: &Term| t.sort().bv_width().unwrap_or(1);
    Ok(match kind {
        "not" => negate(r.expr(3)?),
        "neg" => bv1(Op::BvNeg, vec![r.expr(3)?])?,
        "inc" | "dec" => {
            let a = as_bv(r.expr(3)?);
            let one = Term::bv(width(&a), 1);
            from_bv(mk(if kind == "inc" { Op::BvAdd } else { Op::BvSub }, vec![a, one])?)
        }
        "redor" | "redand" | "redxor" => {
            let a = r.expr(3)?;
            if a.sort().is_bool() {
                return Ok(a);
            }
            let w = width(&a);
            match kind {
                "redor" => Term::not(Term::eq(a, Term::bv(w, 0))),
                "redand" => Term::eq(a, Term::bv(w, bv_mask(w))),
                _ => {
                    let bits: Vec<Term> = (0..w).map(|i| from_bv(Term::mk(Op::Extract(i, i), vec![a.clone()]))).collect();
                    Term::mk(Op::Xor, bits)
                }
            }
        }
        "uext" | "sext" => {
            let a = r.expr(3)?;
            let n = r.num(4)? as u32;
            if n == 0 {
                a
            } else {
                mk(if kind == "uext" { Op::ZeroExtend(n) } else { Op::SignExtend(n) }, vec![as_bv(a)])?
            }
        }
        "slice" => {
            let a = as_bv(r.expr(3)?);
            bv1(Op::Extract(r.num(4)? as u32, r.num(5)? as u32), vec![a])?
        }
        "and" => logical(Op::And, Op::BvAnd)?,
        "or" => logical(Op::Or, Op::BvOr)?,
        "xor" => logical(Op::Xor, Op::BvXor)?,
        "nand" | "nor" | "xnor" => {
            let (bool_op, word_op) = match kind {
                "nand" => (Op::And, Op::BvNand),
                "nor" => (Op::Or, Op::BvNor),
                _ => (Op::Xor, Op::BvXnor),
            };
            match logical(bool_op, word_op)? {
                t if t.sort().is_bool() => Term::not(t),
                t => t,
            }
        }
        "implies" => mk(Op::Implies, vec![r.expr(3)?, r.expr(4)?])?,
        "iff" | "eq" => mk(Op::Eq, vec![r.expr(3)?, r.expr(4)?])?,
        "neq" => Term::not(mk(Op::Eq, vec![r.expr(3)?, r.expr(4)?])?),
        "add" | "sub" | "mul" | "udiv" | "urem" | "sdiv" | "srem" | "smod" | "sll" | "srl" | "sra" => {
            let op = match kind {
                "add" => Op::BvAdd,
                "sub" => Op::BvSub,
                "mul" => Op::BvMul,
                "udiv" => Op::BvUdiv,
                "urem" => Op::BvUrem,
                "sdiv" => Op::BvSdiv,
                "srem" => Op::BvSrem,
                "smod" => Op::BvSmod,
                "sll" => Op::BvShl,
                "srl" => Op::BvLshr,
                _ => Op::BvAshr,
            };
            bv1(op, vec![r.expr(3)?, r.expr(4)?])?
        }
        "ult" | "ulte" | "ugt" | "ugte" | "slt" | "slte" | "sgt" | "sgte" => {
            let op = match kind {
                "ult" => Op::BvUlt,
                "ulte" => Op::BvUle,
                "ugt" => Op::BvUgt,
                "ugte" => Op::BvUge,
                "slt" => Op::BvSlt,
                "slte" => Op::BvSle,
                "sgt" => Op::BvSgt,
                _ => Op::BvSge,
            };
            mk(op, vec![as_bv(r.expr(3)?), as_bv(r.expr(4)?)])?
        }
        "concat" => mk(Op::Concat, vec![as_bv(r.expr(3)?), as_bv(r.expr(4)?)])?,
        "rol" | "ror" => {
            let a = r.expr(3)?;
            let w = width(&a);
            let amount = match r.expr(4)? {
                Term::Const(Constant::BitVec(c)) => c.value,
                Term::Const(Constant::Bool(b)) => b as u128,
                _ => return Err(ConvertError::UnsupportedNode(format!("{} by a non-constant amount", kind))),
            };
            let n = (amount % w as u128) as u32;
            if n == 0 {
                a
            } else {
                bv1(if kind == "rol" { Op::RotateLeft(n) } else { Op::RotateRight(n) }, vec![a])?
            }
        }
        "ite" => mk(Op::Ite, vec![r.expr(3)?, r.expr(4)?, r.expr(5)?])?,
        "read" => mk(Op::Select, vec![r.expr(3)?, r.expr(4)?])?,
        "write" => mk(Op::Store, vec![r.expr(3)?, r.expr(4)?, r.expr(5)?])?,
        other => return Err(r.malformed(format!("unknown operator `{}`", other))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_vmt;

    const TOGGLE: &str = "(declare-const v Bool)(declare-const v.next Bool)
(define-fun sv () Bool (! v :next v.next))
(define-fun init () Bool (! (not v) :init true))
(define-fun trans () Bool (! (= v.next (not v)) :trans true))
(define-fun p () Bool (! true :invar-property 0))";

    const TOGGLE_BTOR: &str = "1 sort bitvec 1
2 state 1 v
3 constd 1 0
4 init 1 2 3
5 not 1 2
6 next 1 2 5
7 bad 3
";

    #[test]
    fn toggle_golden() {
        let doc = parse_vmt(TOGGLE).unwrap();
        assert_eq!(vmt_to_btor(&doc).unwrap(), TOGGLE_BTOR);
    }

    #[test]
    fn toggle_reads_back() {
        let doc = btor_to_vmt(TOGGLE_BTOR).unwrap();
        let v = Term::var("v", Sort::Bool);
        assert_eq!(doc.system.states.len(), 1);
        assert_eq!(doc.system.init, Term::not(v.clone()));
        assert_eq!(doc.system.trans, Term::eq(Term::var("v.next", Sort::Bool), Term::not(v)));
        assert_eq!(doc.properties.len(), 1);
        assert_eq!(doc.properties[0].index, 0);
        assert!(doc.properties[0].formula.is_true());
    }

    #[test]
    fn rejects_int_and_live() {
        let doc = parse_vmt("(declare-const x Int)(declare-const y Int)(define-fun s () Int (! x :next y))").unwrap();
        assert_eq!(vmt_to_btor(&doc), Err(ConvertError::UnsupportedSort("Int".into())));
        let doc = parse_vmt("(declare-const b Bool)(define-fun p () Bool (! b :live-property 3))").unwrap();
        assert_eq!(vmt_to_btor(&doc), Err(ConvertError::LivePropertyUnsupported(3)));
    }

    #[test]
    fn relational_systems_use_a_validity_bit() {
        let doc = parse_vmt(
            "(declare-const c (_ BitVec 4))(declare-const c.next (_ BitVec 4))
             (define-fun s () (_ BitVec 4) (! c :next c.next))
             (define-fun i () Bool (! (bvult c #x3) :init true))
             (define-fun t () Bool (! (bvugt c.next c) :trans true))
             (define-fun p () Bool (! (bvult c #xf) :invar-property 0))",
        )
        .unwrap();
        let text = vmt_to_btor(&doc).unwrap();
        assert!(text.contains(" state 3 init.flag\n"), "{}", text);
        assert!(text.contains(" state 3 trans.ok\n"));
        assert!(text.contains(" input 1 c.next\n"));
        assert!(text.contains(" constraint "));
        let back = btor_to_vmt(&text).unwrap();
        assert_eq!(back.system.states.len(), 3);
        assert_eq!(back.system.inputs.len(), 1);
    }

    #[test]
    fn constraints_reach_init_and_trans() {
        let text = "1 sort bitvec 2\n2 state 1 a\n3 constd 1 3\n4 neq 5 2 3\n";
        assert!(matches!(btor_to_vmt(text), Err(ConvertError::MalformedBtor { line: 4, .. })));
        let text = "1 sort bitvec 2\n2 sort bitvec 1\n3 state 1 a\n4 constd 1 3\n5 neq 2 3 4\n6 constraint 5\n7 bad -5\n";
        let doc = btor_to_vmt(text).unwrap();
        let c = Term::not(Term::eq(Term::var("a", Sort::BitVec(2)), Term::bv(2, 3)));
        let mut init = Vec::new();
        conjuncts(&doc.system.init, &mut init);
        let mut trans = Vec::new();
        conjuncts(&doc.system.trans, &mut trans);
        assert!(init.contains(&c));
        assert!(trans.contains(&c));
        // `-5` is the negation of node 5.
        assert_eq!(doc.properties[0].formula, Term::not(Term::not(c.clone())).clone());
    }

    #[test]
    fn rejects_fairness_and_bad_ids() {
        let text = "1 sort bitvec 1\n2 state 1 a\n3 justice 1 2\n";
        assert_eq!(btor_to_vmt(text).unwrap_err(), ConvertError::UnsupportedNode("justice".into()));
        let text = "1 sort bitvec 1\n1 state 1 a\n";
        assert!(matches!(btor_to_vmt(text), Err(ConvertError::MalformedBtor { line: 2, .. })));
    }

    #[test]
    fn stateless_states_are_frozen_and_width_one_words_bridge() {
        let text = "1 sort bitvec 1\n2 sort bitvec 3\n3 state 2 w\n4 state 1 f\n5 slice 1 3 0 0\n6 add 1 5 4\n7 bad 6\n";
        let doc = btor_to_vmt(text).unwrap();
        let f = Term::var("f", Sort::Bool);
        let mut trans = Vec::new();
        conjuncts(&doc.system.trans, &mut trans);
        assert!(trans.contains(&Term::eq(Term::var("f.next", Sort::Bool), f)));
        let printed = alloc::format!("{}", doc.properties[0].formula);
        assert!(printed.contains("bvadd"), "{}", printed);
    }
}
