//! nuXmv/SMV module text.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ConvertError;
use crate::model::{PropertyKind, TransitionSystem, VmtDocument};
use crate::sort::Sort;
use crate::term::{Constant, Op, Term};

const RESERVED: &[&str] = &[
    "MODULE", "DEFINE", "MDEFINE", "CONSTANTS", "VAR", "IVAR", "FROZENVAR", "INIT", "TRANS", "INVAR", "SPEC",
    "CTLSPEC", "LTLSPEC", "PSLSPEC", "COMPUTE", "NAME", "INVARSPEC", "FAIRNESS", "JUSTICE", "COMPASSION", "ISA",
    "ASSIGN", "CONSTRAINT", "SIMPWFF", "CTLWFF", "LTLWFF", "PSLWFF", "COMPWFF", "IN", "MIN", "MAX", "MIRROR", "PRED",
    "PREDICATES", "process", "array", "of", "boolean", "integer", "real", "word", "word1", "bool", "signed",
    "unsigned", "extend", "resize", "sizeof", "uwconst", "swconst", "EX", "AX", "EF", "AF", "EG", "AG", "E", "F",
    "O", "G", "H", "X", "Y", "Z", "A", "U", "S", "V", "T", "BU", "EBF", "ABF", "EBG", "ABG", "case", "esac", "mod",
    "next", "init", "union", "in", "xor", "xnor", "self", "TRUE", "FALSE", "count", "abs", "max", "min", "toint",
    "floor", "pi", "exp", "sin", "cos", "tan", "ln", "pow", "asin", "acos", "atan", "sqrt", "typeof", "READ",
    "WRITE", "CONSTARRAY", "running", "itype",
];

// Binding strength, higher binds tighter.
const ATOM: u8 = 100;
const UNARY: u8 = 90;
const MUL: u8 = 80;
const ADD: u8 = 70;
const SHIFT: u8 = 60;
const CONCAT: u8 = 55;
const REL: u8 = 40;
const AND: u8 = 30;
const OR: u8 = 20;
const TERNARY: u8 = 15;
const IMPLIES: u8 = 5;

struct Expr {
    text: String,
    prec: u8,
    op: &'static str,
}

impl Expr {
    fn atom(text: String) -> Expr {
        Expr { text, prec: ATOM, op: "" }
    }

    /// Text usable where an operand of strength `min` is expected.
    fn at(&self, min: u8) -> String {
        if self.prec >= min {
            self.text.clone()
        } else {
            format!("({})", self.text)
        }
    }
}

/// Renders the document as a single nuXmv `main` module. Symbols that are
/// not valid SMV identifiers are renamed; each renaming is listed in a
/// comment at the top of the module.
pub fn vmt_to_nuxmv(doc: &VmtDocument) -> Result<String, ConvertError> {
    if let Some(f) = doc.functions.first() {
        return Err(ConvertError::UnsupportedSymbol(f.name.clone()));
    }
    let sys = &doc.system;
    let mut names = BTreeMap::new();
    let mut used = BTreeSet::new();
    let mut renamed = Vec::new();
    let vars = sys.states.iter().map(|s| (&s.current, &s.sort)).chain(sys.inputs.iter().map(|(n, s)| (n, s)));
    for (name, sort) in vars {
        smv_sort(sort)?;
        let id = sanitize(name, &mut used);
        if id != *name {
            renamed.push((id.clone(), name.clone()));
        }
        names.insert(name.clone(), id);
    }
    let pr = Printer { sys, names: &names };

    let mut out = String::from("MODULE main\n");
    for (id, original) in &renamed {
        out.push_str(&format!("-- {} stands for |{}|\n", id, original));
    }
    if !sys.states.is_empty() {
        out.push_str("VAR\n");
        for s in &sys.states {
            out.push_str(&format!("  {} : {};\n", names[&s.current], smv_sort(&s.sort)?));
        }
    }
    if !sys.inputs.is_empty() {
        out.push_str("IVAR\n");
        for (n, s) in &sys.inputs {
            out.push_str(&format!("  {} : {};\n", names[n], smv_sort(s)?));
        }
    }
    out.push_str(&format!("INIT\n  {}\n", pr.expr(&sys.init.inline_lets())?.text));
    out.push_str(&format!("TRANS\n  {}\n", pr.expr(&sys.trans.inline_lets())?.text));
    for p in &doc.properties {
        let e = pr.expr(&p.formula.inline_lets())?;
        out.push_str(&format!("-- {} {}\n", p.kind.keyword(), p.index));
        match p.kind {
            PropertyKind::Invariant => out.push_str(&format!("INVARSPEC {}\n", e.text)),
            PropertyKind::Live => out.push_str(&format!("LTLSPEC F G {}\n", e.at(UNARY))),
        }
    }
    Ok(out)
}

fn smv_sort(s: &Sort) -> Result<String, ConvertError> {
    match s {
        Sort::Bool => Ok("boolean".into()),
        Sort::Int => Ok("integer".into()),
        Sort::Real => Ok("real".into()),
        Sort::BitVec(w) => Ok(format!("word[{}]", w)),
        other => Err(ConvertError::UnsupportedSort(format!("{}", other))),
    }
}

fn sanitize(name: &str, used: &mut BTreeSet<String>) -> String {
    let mut id: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '#' { c } else { '_' })
        .collect();
    if id.is_empty() || !id.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') || RESERVED.contains(&id.as_str())
    {
        id = format!("v_{}", id);
    }
    let base = id.clone();
    let mut i = 0;
    while used.contains(&id) {
        i += 1;
        id = format!("{}_{}", base, i);
    }
    used.insert(id.clone());
    id
}

struct Printer<'a> {
    sys: &'a TransitionSystem,
    names: &'a BTreeMap<String, String>,
}

impl Printer<'_> {
    fn expr(&self, t: &Term) -> Result<Expr, ConvertError> {
        match t {
            Term::Var(n, _) => {
                if let Some(s) = self.sys.state_by_next(n) {
                    Ok(Expr::atom(format!("next({})", self.names[&s.current])))
                } else if let Some(id) = self.names.get(n) {
                    Ok(Expr::atom(id.clone()))
                } else {
                    Err(ConvertError::UnsupportedSymbol(n.clone()))
                }
            }
            Term::Const(c) => Ok(constant(c)),
            Term::Annot(inner, _) => self.expr(inner),
            Term::Let(..) => self.expr(&t.inline_lets()),
            Term::Quant(..) => Err(ConvertError::QuantifiedSystem),
            Term::App(op, args, _) => self.app(op, args),
        }
    }

    fn app(&self, op: &Op, args: &[Term]) -> Result<Expr, ConvertError> {
        let a: Vec<Expr> = args.iter().map(|x| self.expr(x)).collect::<Result<_, _>>()?;
        Ok(match op {
            Op::Not | Op::BvNot => prefix("!", &a[0]),
            Op::Neg | Op::BvNeg => prefix("-", &a[0]),
            Op::And | Op::BvAnd => assoc(&a, " & ", AND),
            Op::Or | Op::BvOr => assoc(&a, " | ", OR),
            Op::Xor | Op::BvXor => left(&a, " xor ", OR),
            Op::BvXnor => left(&a, " xnor ", OR),
            Op::BvNand => prefix("!", &assoc(&a, " & ", AND)),
            Op::BvNor => prefix("!", &assoc(&a, " | ", OR)),
            Op::Implies => {
                let mut acc = binary(&a[a.len() - 2], " -> ", &a[a.len() - 1], IMPLIES, IMPLIES + 1, IMPLIES);
                for x in a[..a.len() - 2].iter().rev() {
                    acc = binary(x, " -> ", &acc, IMPLIES, IMPLIES + 1, IMPLIES);
                }
                acc
            }
            Op::Eq => chain(&a, " = "),
            Op::Distinct => {
                let mut parts = Vec::new();
                for i in 0..a.len() {
                    for j in i + 1..a.len() {
                        parts.push(binary(&a[i], " != ", &a[j], REL, REL + 1, REL + 1));
                    }
                }
                assoc(&parts, " & ", AND)
            }
            Op::Ite => Expr {
                text: format!("{} ? {} : {}", a[0].at(TERNARY + 1), a[1].at(TERNARY + 1), a[2].at(TERNARY)),
                prec: TERNARY,
                op: "?",
            },
            Op::Add | Op::BvAdd => left(&a, " + ", ADD),
            Op::Sub | Op::BvSub => left(&a, " - ", ADD),
            Op::Mul | Op::BvMul => left(&a, " * ", MUL),
            Op::RealDiv => left(&a, " / ", MUL),
            Op::Abs => Expr::atom(format!("abs({})", a[0].text)),
            Op::Le | Op::BvUle => chain(&a, " <= "),
            Op::Lt | Op::BvUlt => chain(&a, " < "),
            Op::Ge | Op::BvUge => chain(&a, " >= "),
            Op::Gt | Op::BvUgt => chain(&a, " > "),
            Op::BvSlt | Op::BvSle | Op::BvSgt | Op::BvSge => {
                let rel = match op {
                    Op::BvSlt => " < ",
                    Op::BvSle => " <= ",
                    Op::BvSgt => " > ",
                    _ => " >= ",
                };
                let s: Vec<Expr> = a.iter().map(|x| Expr::atom(format!("signed({})", x.text))).collect();
                chain(&s, rel)
            }
            Op::BvComp => Expr::atom(format!("word1({})", chain(&a, " = ").text)),
            Op::BvShl | Op::BvLshr => {
                let w = args[0].sort().bv_width().unwrap_or(1);
                let shift = binary(&a[0], if *op == Op::BvShl { " << " } else { " >> " }, &a[1], SHIFT, SHIFT, SHIFT + 1);
                // Shifting by the width or more yields zero, as in SMT-LIB.
                Expr {
                    text: format!("{} < {} ? {} : {}", a[1].at(REL + 1), word_const(w, w as u128), shift.text, word_const(w, 0)),
                    prec: TERNARY,
                    op: "?",
                }
            }
            Op::Concat => left(&a, " :: ", CONCAT),
            Op::Repeat(n) => {
                let copies: Vec<Expr> = (0..*n).map(|_| Expr { text: a[0].text.clone(), prec: a[0].prec, op: a[0].op }).collect();
                left(&copies, " :: ", CONCAT)
            }
            Op::Extract(i, j) => Expr::atom(format!("{}[{}:{}]", a[0].at(ATOM), i, j)),
            Op::ZeroExtend(i) => Expr::atom(format!("extend({}, {})", a[0].text, i)),
            Op::SignExtend(i) => Expr::atom(format!("unsigned(extend(signed({}), {}))", a[0].text, i)),
            Op::Uf(n) | Op::Macro(n) => return Err(ConvertError::UnsupportedSymbol(n.clone())),
            other => return Err(ConvertError::UnsupportedSymbol(format!("{}", other))),
        })
    }
}

fn constant(c: &Constant) -> Expr {
    match c {
        Constant::Bool(true) => Expr::atom("TRUE".into()),
        Constant::Bool(false) => Expr::atom("FALSE".into()),
        Constant::Int(n) if *n < 0 => Expr { text: format!("-{}", n.unsigned_abs()), prec: UNARY - 1, op: "-" },
        Constant::Int(n) => Expr::atom(n.to_string()),
        Constant::Real(r) => Expr::atom(r.clone()),
        Constant::BitVec(b) => Expr::atom(word_const(b.width, b.value)),
    }
}

fn word_const(width: u32, value: u128) -> String {
    let mut bits = String::new();
    for i in (0..width).rev() {
        bits.push(if i < 128 && (value >> i) & 1 == 1 { '1' } else { '0' });
    }
    format!("0ub{}_{}", width, bits)
}

fn prefix(sym: &str, e: &Expr) -> Expr {
    Expr { text: format!("{}{}", sym, e.at(UNARY)), prec: UNARY, op: "unary" }
}

fn binary(l: &Expr, sym: &'static str, r: &Expr, prec: u8, lmin: u8, rmin: u8) -> Expr {
    Expr { text: format!("{}{}{}", l.at(lmin), sym, r.at(rmin)), prec, op: sym }
}

/// Associative operator: operands with the same operator need no brackets.
fn assoc(parts: &[Expr], sym: &'static str, prec: u8) -> Expr {
    if parts.len() == 1 {
        return Expr { text: parts[0].text.clone(), prec: parts[0].prec, op: parts[0].op };
    }
    let texts: Vec<String> = parts
        .iter()
        .map(|p| if p.op == sym { p.text.clone() } else { p.at(prec + 1) })
        .collect();
    Expr { text: texts.join(sym), prec, op: sym }
}

/// Left-associative chain `a op b op c`.
fn left(parts: &[Expr], sym: &'static str, prec: u8) -> Expr {
    let mut text = parts[0].at(prec);
    for p in &parts[1..] {
        text.push_str(sym);
        text.push_str(&p.at(prec + 1));
    }
    Expr { text, prec, op: sym }
}

/// Chained relation `a op b op c`, read as a conjunction of neighbours.
fn chain(parts: &[Expr], sym: &'static str) -> Expr {
    let pairs: Vec<Expr> = parts.windows(2).map(|w| binary(&w[0], sym, &w[1], REL, REL + 1, REL + 1)).collect();
    assoc(&pairs, " & ", AND)
}
