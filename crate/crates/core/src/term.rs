//! Sorted terms over the SMT-LIB core, integer/real arithmetic, fixed-size
//! bit-vector and array theories, plus user-declared functions.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::sexpr::{write_symbol, SExpr};
use crate::sort::Sort;

/// Bit-vector literal of at most 128 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BvConst {
    pub width: u32,
    pub value: u128,
}

pub const MAX_CONST_WIDTH: u32 = 128;

pub fn bv_mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

impl BvConst {
    pub fn new(width: u32, value: u128) -> Self {
        BvConst {
            width,
            value: value & bv_mask(width),
        }
    }

    pub fn bit(&self, i: u32) -> bool {
        (self.value >> i) & 1 == 1
    }

    /// Two's complement interpretation.
    pub fn signed(&self) -> i128 {
        if self.width == 128 {
            return self.value as i128;
        }
        if self.bit(self.width - 1) {
            self.value as i128 - (1i128 << self.width)
        } else {
            self.value as i128
        }
    }
}

impl fmt::Display for BvConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("#b")?;
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Bool(bool),
    Int(i128),
    /// Non-negative decimal literal text, e.g. `2.50`.
    Real(String),
    BitVec(BvConst),
}

impl Constant {
    pub fn sort(&self) -> Sort {
        match self {
            Constant::Bool(_) => Sort::Bool,
            Constant::Int(_) => Sort::Int,
            Constant::Real(_) => Sort::Real,
            Constant::BitVec(b) => Sort::BitVec(b.width),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Bool(b) => write!(f, "{}", b),
            Constant::Int(n) if *n < 0 => write!(f, "(- {})", n.unsigned_abs()),
            Constant::Int(n) => write!(f, "{}", n),
            Constant::Real(r) => f.write_str(r),
            Constant::BitVec(b) => write!(f, "{}", b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Not,
    And,
    Or,
    Xor,
    Implies,
    Eq,
    Distinct,
    Ite,
    Add,
    Sub,
    Neg,
    Mul,
    IntDiv,
    Mod,
    Abs,
    RealDiv,
    Le,
    Lt,
    Ge,
    Gt,
    ToReal,
    ToInt,
    IsInt,
    Concat,
    Extract(u32, u32),
    BvNot,
    BvAnd,
    BvOr,
    BvXor,
    BvNand,
    BvNor,
    BvXnor,
    BvNeg,
    BvAdd,
    BvSub,
    BvMul,
    BvUdiv,
    BvUrem,
    BvSdiv,
    BvSrem,
    BvSmod,
    BvShl,
    BvLshr,
    BvAshr,
    BvUlt,
    BvUle,
    BvUgt,
    BvUge,
    BvSlt,
    BvSle,
    BvSgt,
    BvSge,
    BvComp,
    ZeroExtend(u32),
    SignExtend(u32),
    RotateLeft(u32),
    RotateRight(u32),
    Repeat(u32),
    Select,
    Store,
    /// `(as const <array sort>)`.
    ConstArray(Sort),
    /// Declared (rigid) function of arity at least one.
    Uf(String),
    /// Application of a `define-fun` macro.
    Macro(String),
}

const PLAIN_OPS: &[(&str, Op)] = &[
    ("not", Op::Not),
    ("and", Op::And),
    ("or", Op::Or),
    ("xor", Op::Xor),
    ("=>", Op::Implies),
    ("=", Op::Eq),
    ("distinct", Op::Distinct),
    ("ite", Op::Ite),
    ("+", Op::Add),
    ("-", Op::Sub),
    ("*", Op::Mul),
    ("div", Op::IntDiv),
    ("mod", Op::Mod),
    ("abs", Op::Abs),
    ("/", Op::RealDiv),
    ("<=", Op::Le),
    ("<", Op::Lt),
    (">=", Op::Ge),
    (">", Op::Gt),
    ("to_real", Op::ToReal),
    ("to_int", Op::ToInt),
    ("is_int", Op::IsInt),
    ("concat", Op::Concat),
    ("bvnot", Op::BvNot),
    ("bvand", Op::BvAnd),
    ("bvor", Op::BvOr),
    ("bvxor", Op::BvXor),
    ("bvnand", Op::BvNand),
    ("bvnor", Op::BvNor),
    ("bvxnor", Op::BvXnor),
    ("bvneg", Op::BvNeg),
    ("bvadd", Op::BvAdd),
    ("bvsub", Op::BvSub),
    ("bvmul", Op::BvMul),
    ("bvudiv", Op::BvUdiv),
    ("bvurem", Op::BvUrem),
    ("bvsdiv", Op::BvSdiv),
    ("bvsrem", Op::BvSrem),
    ("bvsmod", Op::BvSmod),
    ("bvshl", Op::BvShl),
    ("bvlshr", Op::BvLshr),
    ("bvashr", Op::BvAshr),
    ("bvult", Op::BvUlt),
    ("bvule", Op::BvUle),
    ("bvugt", Op::BvUgt),
    ("bvuge", Op::BvUge),
    ("bvslt", Op::BvSlt),
    ("bvsle", Op::BvSle),
    ("bvsgt", Op::BvSgt),
    ("bvsge", Op::BvSge),
    ("bvcomp", Op::BvComp),
    ("select", Op::Select),
    ("store", Op::Store),
];

impl Op {
    /// Looks up a non-indexed theory operator by its SMT-LIB name.
    pub fn from_name(name: &str) -> Option<Op> {
        PLAIN_OPS.iter().find(|(n, _)| *n == name).map(|(_, op)| op.clone())
    }

    /// Looks up an indexed operator `(_ name i..)`.
    pub fn from_indexed(name: &str, idx: &[u32]) -> Option<Op> {
        Some(match (name, idx) {
            ("extract", [i, j]) => Op::Extract(*i, *j),
            ("zero_extend", [i]) => Op::ZeroExtend(*i),
            ("sign_extend", [i]) => Op::SignExtend(*i),
            ("rotate_left", [i]) => Op::RotateLeft(*i),
            ("rotate_right", [i]) => Op::RotateRight(*i),
            ("repeat", [i]) => Op::Repeat(*i),
            _ => return None,
        })
    }

    pub fn is_theory_name(name: &str) -> bool {
        Op::from_name(name).is_some()
    }

    fn plain_name(&self) -> Option<&'static str> {
        if let Op::Neg = self {
            return Some("-");
        }
        PLAIN_OPS.iter().find(|(_, op)| op == self).map(|(n, _)| *n)
    }

    /// Result sort of applying this theory operator to arguments of the given
    /// sorts. `Uf` and `Macro` carry no signature and are rejected here.
    pub fn result_sort(&self, args: &[Sort]) -> Result<Sort, SortError> {
        use Op::*;
        let fail = |expected: &str| -> Result<Sort, SortError> {
            Err(SortError {
                expected: expected.to_string(),
                found: join_sorts(args),
            })
        };
        let all_same = |min: usize| args.len() >= min && args.iter().all(|s| *s == args[0]);
        match self {
            Not => match args {
                [Sort::Bool] => Ok(Sort::Bool),
                _ => fail("Bool"),
            },
            And | Or => {
                if args.iter().all(|s| s.is_bool()) && !args.is_empty() {
                    Ok(Sort::Bool)
                } else {
                    fail("Bool, ..")
                }
            }
            Xor | Implies => {
                if args.len() >= 2 && args.iter().all(|s| s.is_bool()) {
                    Ok(Sort::Bool)
                } else {
                    fail("Bool, Bool, ..")
                }
            }
            Eq | Distinct => {
                if all_same(2) {
                    Ok(Sort::Bool)
                } else {
                    fail("two or more arguments of one sort")
                }
            }
            Ite => match args {
                [Sort::Bool, a, b] if a == b => Ok(a.clone()),
                _ => fail("Bool, S, S"),
            },
            Add | Sub | Mul => {
                if all_same(2) && args[0].is_arith() {
                    Ok(args[0].clone())
                } else {
                    fail("two or more Int or Real arguments")
                }
            }
            Neg => match args {
                [s] if s.is_arith() => Ok(s.clone()),
                _ => fail("Int or Real"),
            },
            IntDiv => {
                if all_same(2) && args[0] == Sort::Int {
                    Ok(Sort::Int)
                } else {
                    fail("Int, Int, ..")
                }
            }
            Mod => match args {
                [Sort::Int, Sort::Int] => Ok(Sort::Int),
                _ => fail("Int, Int"),
            },
            Abs => match args {
                [Sort::Int] => Ok(Sort::Int),
                _ => fail("Int"),
            },
            RealDiv => {
                if all_same(2) && args[0] == Sort::Real {
                    Ok(Sort::Real)
                } else {
                    fail("Real, Real, ..")
                }
            }
            Le | Lt | Ge | Gt => {
                if all_same(2) && args[0].is_arith() {
                    Ok(Sort::Bool)
                } else {
                    fail("two or more Int or Real arguments")
                }
            }
            ToReal => match args {
                [Sort::Int] => Ok(Sort::Real),
                _ => fail("Int"),
            },
            ToInt => match args {
                [Sort::Real] => Ok(Sort::Int),
                _ => fail("Real"),
            },
            IsInt => match args {
                [Sort::Real] => Ok(Sort::Bool),
                _ => fail("Real"),
            },
            Concat => {
                let mut total = 0u32;
                for s in args {
                    match s {
                        Sort::BitVec(w) => total += w,
                        _ => return fail("bit-vectors"),
                    }
                }
                if args.len() >= 2 {
                    Ok(Sort::BitVec(total))
                } else {
                    fail("two or more bit-vectors")
                }
            }
            Extract(i, j) => match args {
                [Sort::BitVec(w)] if i >= j && i < w => Ok(Sort::BitVec(i - j + 1)),
                _ => fail(&format!("bit-vector wider than {}", i)),
            },
            BvNot | BvNeg | RotateLeft(_) | RotateRight(_) => match args {
                [Sort::BitVec(w)] => Ok(Sort::BitVec(*w)),
                _ => fail("(_ BitVec n)"),
            },
            BvAnd | BvOr | BvXor | BvAdd | BvMul => {
                if all_same(2) && args[0].bv_width().is_some() {
                    Ok(args[0].clone())
                } else {
                    fail("two or more bit-vectors of one width")
                }
            }
            BvNand | BvNor | BvXnor | BvSub | BvUdiv | BvUrem | BvSdiv | BvSrem | BvSmod | BvShl
            | BvLshr | BvAshr => match args {
                [a @ Sort::BitVec(_), b] if a == b => Ok(a.clone()),
                _ => fail("two bit-vectors of one width"),
            },
            BvUlt | BvUle | BvUgt | BvUge | BvSlt | BvSle | BvSgt | BvSge => match args {
                [a @ Sort::BitVec(_), b] if a == b => Ok(Sort::Bool),
                _ => fail("two bit-vectors of one width"),
            },
            BvComp => match args {
                [a @ Sort::BitVec(_), b] if a == b => Ok(Sort::BitVec(1)),
                _ => fail("two bit-vectors of one width"),
            },
            ZeroExtend(i) | SignExtend(i) => match args {
                [Sort::BitVec(w)] => Ok(Sort::BitVec(w + i)),
                _ => fail("(_ BitVec n)"),
            },
            Repeat(i) => match args {
                [Sort::BitVec(w)] if *i >= 1 => Ok(Sort::BitVec(w * i)),
                _ => fail("(_ BitVec n)"),
            },
            Select => match args {
                [Sort::Array(i, e), idx] if **i == *idx => Ok((**e).clone()),
                _ => fail("(Array I E), I"),
            },
            Store => match args {
                [a @ Sort::Array(i, e), idx, v] if **i == *idx && **e == *v => Ok(a.clone()),
                _ => fail("(Array I E), I, E"),
            },
            ConstArray(s) => match (s, args) {
                (Sort::Array(_, e), [v]) if **e == *v => Ok(s.clone()),
                _ => fail("array element"),
            },
            Uf(_) | Macro(_) => fail("declared signature"),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.plain_name() {
            return f.write_str(n);
        }
        match self {
            Op::Extract(i, j) => write!(f, "(_ extract {} {})", i, j),
            Op::ZeroExtend(i) => write!(f, "(_ zero_extend {})", i),
            Op::SignExtend(i) => write!(f, "(_ sign_extend {})", i),
            Op::RotateLeft(i) => write!(f, "(_ rotate_left {})", i),
            Op::RotateRight(i) => write!(f, "(_ rotate_right {})", i),
            Op::Repeat(i) => write!(f, "(_ repeat {})", i),
            Op::ConstArray(s) => write!(f, "(as const {})", s),
            Op::Uf(n) | Op::Macro(n) => write_symbol(f, n),
            _ => unreachable!("plain operator without a name"),
        }
    }
}

/// Argument sorts that do not fit an operator's signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortError {
    pub expected: String,
    pub found: String,
}

pub fn join_sorts(sorts: &[Sort]) -> String {
    let mut s = String::new();
    for (i, sort) in sorts.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{}", sort));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// An attribute `:keyword value` attached with `!`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attribute {
    pub keyword: String,
    pub value: Option<SExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Declared constant, function parameter, or bound variable.
    Var(String, Sort),
    Const(Constant),
    App(Op, Vec<Term>, Sort),
    Let(Vec<(String, Term)>, Box<Term>),
    Quant(Quantifier, Vec<(String, Sort)>, Box<Term>),
    Annot(Box<Term>, Vec<Attribute>),
}

impl Term {
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) | Term::App(_, _, s) => s.clone(),
            Term::Const(c) => c.sort(),
            Term::Let(_, body) => body.sort(),
            Term::Quant(..) => Sort::Bool,
            Term::Annot(t, _) => t.sort(),
        }
    }

    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn bool(b: bool) -> Term {
        Term::Const(Constant::Bool(b))
    }

    pub fn tt() -> Term {
        Term::bool(true)
    }

    pub fn ff() -> Term {
        Term::bool(false)
    }

    pub fn int(n: i128) -> Term {
        Term::Const(Constant::Int(n))
    }

    pub fn bv(width: u32, value: u128) -> Term {
        Term::Const(Constant::BitVec(BvConst::new(width, value)))
    }

    pub fn as_bool_const(&self) -> Option<bool> {
        match self {
            Term::Const(Constant::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_bool_const() == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.as_bool_const() == Some(false)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(n, _) => Some(n),
            _ => None,
        }
    }

    /// Applies a theory operator after checking argument sorts.
    pub fn app(op: Op, args: Vec<Term>) -> Result<Term, SortError> {
        let sorts: Vec<Sort> = args.iter().map(Term::sort).collect();
        let s = op.result_sort(&sorts)?;
        Ok(Term::App(op, args, s))
    }

    /// Like [`Term::app`] for callers that already guarantee well-sortedness.
    pub fn mk(op: Op, args: Vec<Term>) -> Term {
        match Term::app(op, args) {
            Ok(t) => t,
            Err(e) => panic!("ill-sorted application: expected {}, found {}", e.expected, e.found),
        }
    }

    pub fn not(t: Term) -> Term {
        match t {
            Term::Const(Constant::Bool(b)) => Term::bool(!b),
            Term::App(Op::Not, mut args, _) => args.pop().unwrap(),
            t => Term::App(Op::Not, vec![t], Sort::Bool),
        }
    }

    /// Conjunction with constant folding; empty is `true`, a singleton is
    /// returned unchanged.
    pub fn and(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut out = Vec::new();
        for p in parts {
            match p.as_bool_const() {
                Some(true) => {}
                Some(false) => return Term::ff(),
                None => out.push(p),
            }
        }
        match out.len() {
            0 => Term::tt(),
            1 => out.pop().unwrap(),
            _ => Term::App(Op::And, out, Sort::Bool),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut out = Vec::new();
        for p in parts {
            match p.as_bool_const() {
                Some(false) => {}
                Some(true) => return Term::tt(),
                None => out.push(p),
            }
        }
        match out.len() {
            0 => Term::ff(),
            1 => out.pop().unwrap(),
            _ => Term::App(Op::Or, out, Sort::Bool),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        if a.is_true() {
            return b;
        }
        if a.is_false() || b.is_true() {
            return Term::tt();
        }
        Term::App(Op::Implies, vec![a, b], Sort::Bool)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::mk(Op::Eq, vec![a, b])
    }

    /// Boolean equivalence with folding of constant sides.
    pub fn iff(a: Term, b: Term) -> Term {
        match (a.as_bool_const(), b.as_bool_const()) {
            (Some(true), _) => b,
            (Some(false), _) => Term::not(b),
            (_, Some(true)) => a,
            (_, Some(false)) => Term::not(a),
            _ => Term::eq(a, b),
        }
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        match c.as_bool_const() {
            Some(true) => a,
            Some(false) => b,
            None => Term::mk(Op::Ite, vec![c, a, b]),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Term::Quant(..) => true,
            Term::Var(..) | Term::Const(_) => false,
            Term::App(_, args, _) => args.iter().any(Term::has_quantifier),
            Term::Let(bs, body) => bs.iter().any(|(_, t)| t.has_quantifier()) || body.has_quantifier(),
            Term::Annot(t, _) => t.has_quantifier(),
        }
    }

    /// Free variables (declared constants and unbound parameters).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(n, _) => {
                if !bound.iter().any(|b| b == n) {
                    out.insert(n.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args, _) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Let(bs, body) => {
                for (_, t) in bs {
                    t.collect_free(bound, out);
                }
                let n = bound.len();
                bound.extend(bs.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            Term::Quant(_, vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            Term::Annot(t, _) => t.collect_free(bound, out),
        }
    }

    /// Names of user functions (`Uf`) and macros applied anywhere in the term.
    pub fn applied_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::App(op, args, _) => {
                if let Op::Uf(n) | Op::Macro(n) = op {
                    out.insert(n.clone());
                }
                args.iter().for_each(|a| a.applied_symbols(out));
            }
            Term::Let(bs, body) => {
                bs.iter().for_each(|(_, t)| t.applied_symbols(out));
                body.applied_symbols(out);
            }
            Term::Quant(_, _, body) => body.applied_symbols(out),
            Term::Annot(t, _) => t.applied_symbols(out),
            Term::Var(..) | Term::Const(_) => {}
        }
    }

    pub fn strip_annotations(&self) -> Term {
        match self {
            Term::Annot(t, _) => t.strip_annotations(),
            Term::Var(..) | Term::Const(_) => self.clone(),
            Term::App(op, args, s) => Term::App(
                op.clone(),
                args.iter().map(Term::strip_annotations).collect(),
                s.clone(),
            ),
            Term::Let(bs, body) => Term::Let(
                bs.iter().map(|(n, t)| (n.clone(), t.strip_annotations())).collect(),
                Box::new(body.strip_annotations()),
            ),
            Term::Quant(q, vs, body) => Term::Quant(*q, vs.clone(), Box::new(body.strip_annotations())),
        }
    }

    /// Capture-avoiding substitution of free variables. `f` returns the
    /// replacement for a free occurrence, or `None` to keep it.
    pub fn substitute(&self, f: &dyn Fn(&str, &Sort) -> Option<Term>) -> Term {
        let mut cx = Subst { f, scopes: Vec::new() };
        cx.term(self)
    }

    /// Renames free variables; names missing from `map` are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Term {
        self.substitute(&|n, s| map(n).map(|m| Term::Var(m, s.clone())))
    }

    /// Rewrites function symbols bottom-up (used for renaming rigid symbols).
    pub fn map_ops(&self, f: &dyn Fn(&Op) -> Option<Op>) -> Term {
        match self {
            Term::Var(..) | Term::Const(_) => self.clone(),
            Term::App(op, args, s) => Term::App(
                f(op).unwrap_or_else(|| op.clone()),
                args.iter().map(|a| a.map_ops(f)).collect(),
                s.clone(),
            ),
            Term::Let(bs, body) => Term::Let(
                bs.iter().map(|(n, t)| (n.clone(), t.map_ops(f))).collect(),
                Box::new(body.map_ops(f)),
            ),
            Term::Quant(q, vs, body) => Term::Quant(*q, vs.clone(), Box::new(body.map_ops(f))),
            Term::Annot(t, a) => Term::Annot(Box::new(t.map_ops(f)), a.clone()),
        }
    }

    /// Replaces every `let` by substitution of its bindings.
    pub fn inline_lets(&self) -> Term {
        match self {
            Term::Var(..) | Term::Const(_) => self.clone(),
            Term::App(op, args, s) => Term::App(op.clone(), args.iter().map(Term::inline_lets).collect(), s.clone()),
            Term::Let(bs, body) => {
                let values: Vec<(String, Term)> = bs.iter().map(|(n, v)| (n.clone(), v.inline_lets())).collect();
                body.inline_lets()
                    .substitute(&|n, _| values.iter().find(|(m, _)| m == n).map(|(_, v)| v.clone()))
            }
            Term::Quant(q, vs, body) => Term::Quant(*q, vs.clone(), Box::new(body.inline_lets())),
            Term::Annot(t, a) => Term::Annot(Box::new(t.inline_lets()), a.clone()),
        }
    }

    /// Number of nodes, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(..) | Term::Const(_) => 1,
            Term::App(_, args, _) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Let(bs, body) => 1 + bs.iter().map(|(_, t)| t.size()).sum::<usize>() + body.size(),
            Term::Quant(_, _, body) => 1 + body.size(),
            Term::Annot(t, _) => 1 + t.size(),
        }
    }
}

struct Subst<'a> {
    f: &'a dyn Fn(&str, &Sort) -> Option<Term>,
    // innermost last: bound name -> renamed name (if renamed)
    scopes: Vec<(String, Option<String>)>,
}

impl Subst<'_> {
    fn lookup(&self, name: &str, sort: &Sort) -> Option<Term> {
        for (n, renamed) in self.scopes.iter().rev() {
            if n == name {
                return renamed.as_ref().map(|r| Term::Var(r.clone(), sort.clone()));
            }
        }
        (self.f)(name, sort)
    }

    /// Picks names for binders that do not capture variables introduced by
    /// the substitution into `body`.
    fn bind(&mut self, names: &[String], body: &Term) -> Vec<String> {
        let mut outer_free = BTreeSet::new();
        let mut sorts = Vec::new();
        collect_free_sorted(body, &mut Vec::new(), &mut sorts);
        let body_free = body.free_vars();
        for (n, s) in &sorts {
            if names.contains(n) {
                continue;
            }
            match self.lookup(n, s) {
                Some(t) => outer_free.extend(t.free_vars()),
                None => {
                    outer_free.insert(n.clone());
                }
            }
        }
        let mut chosen = Vec::new();
        for n in names {
            if outer_free.contains(n) {
                let mut i = 0usize;
                let fresh = loop {
                    let cand = format!("{}!{}", n, i);
                    if !outer_free.contains(&cand) && !body_free.contains(&cand) && !names.contains(&cand) {
                        break cand;
                    }
                    i += 1;
                };
                self.scopes.push((n.clone(), Some(fresh.clone())));
                chosen.push(fresh);
            } else {
                self.scopes.push((n.clone(), None));
                chosen.push(n.clone());
            }
        }
        chosen
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(n, s) => self.lookup(n, s).unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
            Term::App(op, args, s) => Term::App(op.clone(), args.iter().map(|a| self.term(a)).collect(), s.clone()),
            Term::Let(bs, body) => {
                let values: Vec<Term> = bs.iter().map(|(_, v)| self.term(v)).collect();
                let names: Vec<String> = bs.iter().map(|(n, _)| n.clone()).collect();
                let depth = self.scopes.len();
                let chosen = self.bind(&names, body);
                let body = self.term(body);
                self.scopes.truncate(depth);
                Term::Let(chosen.into_iter().zip(values).collect(), Box::new(body))
            }
            Term::Quant(q, vs, body) => {
                let names: Vec<String> = vs.iter().map(|(n, _)| n.clone()).collect();
                let depth = self.scopes.len();
                let chosen = self.bind(&names, body);
                let body = self.term(body);
                self.scopes.truncate(depth);
                Term::Quant(
                    *q,
                    chosen.into_iter().zip(vs.iter().map(|(_, s)| s.clone())).collect(),
                    Box::new(body),
                )
            }
            Term::Annot(inner, attrs) => Term::Annot(Box::new(self.term(inner)), attrs.clone()),
        }
    }
}

fn collect_free_sorted(t: &Term, bound: &mut Vec<String>, out: &mut Vec<(String, Sort)>) {
    match t {
        Term::Var(n, s) => {
            if !bound.iter().any(|b| b == n) && !out.iter().any(|(m, _)| m == n) {
                out.push((n.clone(), s.clone()));
            }
        }
        Term::Const(_) => {}
        Term::App(_, args, _) => args.iter().for_each(|a| collect_free_sorted(a, bound, out)),
        Term::Let(bs, body) => {
            for (_, v) in bs {
                collect_free_sorted(v, bound, out);
            }
            let n = bound.len();
            bound.extend(bs.iter().map(|(v, _)| v.clone()));
            collect_free_sorted(body, bound, out);
            bound.truncate(n);
        }
        Term::Quant(_, vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().map(|(v, _)| v.clone()));
            collect_free_sorted(body, bound, out);
            bound.truncate(n);
        }
        Term::Annot(inner, _) => collect_free_sorted(inner, bound, out),
    }
}

/// Free variables together with their sorts, in first-occurrence order.
pub fn free_vars_sorted(t: &Term) -> Vec<(String, Sort)> {
    let mut out = Vec::new();
    collect_free_sorted(t, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{}", self.keyword)?;
        if let Some(v) = &self.value {
            write!(f, " {}", v)?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) => write_symbol(f, n),
            Term::Const(c) => write!(f, "{}", c),
            Term::App(op, args, _) if args.is_empty() => write!(f, "{}", op),
            Term::App(op, args, _) => {
                match op {
                    Op::ConstArray(_) => write!(f, "({}", op)?,
                    _ => write!(f, "({}", op)?,
                }
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
            Term::Let(bs, body) => {
                f.write_str("(let (")?;
                for (i, (n, t)) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str("(")?;
                    write_symbol(f, n)?;
                    write!(f, " {})", t)?;
                }
                write!(f, ") {})", body)
            }
            Term::Quant(q, vs, body) => {
                f.write_str(match q {
                    Quantifier::Forall => "(forall (",
                    Quantifier::Exists => "(exists (",
                })?;
                for (i, (n, s)) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str("(")?;
                    write_symbol(f, n)?;
                    write!(f, " {})", s)?;
                }
                write!(f, ") {})", body)
            }
            Term::Annot(t, attrs) => {
                write!(f, "(! {}", t)?;
                for a in attrs {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}
