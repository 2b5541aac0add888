//! The SMT-LIB command subset allowed in VMT-LIB files.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::FrontendError;
use crate::sexpr::{parse_sexprs, write_symbol, Atom, Pos, SExpr, SExprKind};
use crate::sort::Sort;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommandKind {
    SetLogic(String),
    SetOption(String, Option<SExpr>),
    DeclareSort(String, u32),
    DefineSort(String, Vec<String>, Sort),
    /// Also produced by `declare-const`.
    DeclareFun(String, Vec<Sort>, Sort),
    DefineFun(String, Vec<(String, Sort)>, Sort, SExpr),
    /// The `(assert true)` allowed as the last command.
    TrailingAssertTrue,
}

/// A command and the position of its opening parenthesis.
///
/// Equality ignores the position.
#[derive(Debug, Clone)]
pub struct Command {
    pub kind: CommandKind,
    pub pos: Pos,
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for Command {}

/// Commands that other SMT-LIB scripts use and VMT-LIB forbids.
pub const DISALLOWED_COMMANDS: &[&str] = &[
    "assert",
    "check-sat",
    "check-sat-assuming",
    "declare-datatype",
    "declare-datatypes",
    "define-fun-rec",
    "define-funs-rec",
    "echo",
    "exit",
    "get-assertions",
    "get-assignment",
    "get-info",
    "get-model",
    "get-option",
    "get-proof",
    "get-unsat-assumptions",
    "get-unsat-core",
    "get-value",
    "pop",
    "push",
    "reset",
    "reset-assertions",
    "set-info",
    "declare-datatypes-rec",
    "minimize",
    "maximize",
    "simplify",
    "eval",
    "check-sat-using",
    "apply",
];

fn malformed(pos: Pos, reason: &str) -> FrontendError {
    FrontendError::MalformedCommand {
        reason: reason.to_string(),
        pos,
    }
}

fn symbol_arg(e: &SExpr, what: &str) -> Result<String, FrontendError> {
    e.as_symbol()
        .map(str::to_string)
        .ok_or_else(|| malformed(e.pos, what))
}

fn sort_list(e: &SExpr) -> Result<Vec<Sort>, FrontendError> {
    e.as_list()
        .ok_or_else(|| malformed(e.pos, "expected a sort list"))?
        .iter()
        .map(Sort::from_sexpr)
        .collect()
}

fn parse_command(e: &SExpr, is_last: bool) -> Result<Command, FrontendError> {
    let items = e.as_list().ok_or_else(|| malformed(e.pos, "expected a parenthesized command"))?;
    let head = items
        .first()
        .and_then(SExpr::as_symbol)
        .ok_or_else(|| malformed(e.pos, "expected a command name"))?;
    let args = &items[1..];
    let arity = |n: usize| -> Result<(), FrontendError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(malformed(e.pos, "wrong number of arguments"))
        }
    };
    let kind = match head {
        "set-logic" => {
            arity(1)?;
            CommandKind::SetLogic(symbol_arg(&args[0], "expected a logic name")?)
        }
        "set-option" => {
            let name = args
                .first()
                .and_then(SExpr::as_keyword)
                .ok_or_else(|| malformed(e.pos, "expected an option keyword"))?;
            if args.len() > 2 {
                return Err(malformed(e.pos, "wrong number of arguments"));
            }
            CommandKind::SetOption(name.to_string(), args.get(1).cloned())
        }
        "declare-sort" => {
            let name = symbol_arg(args.first().ok_or_else(|| malformed(e.pos, "missing sort name"))?, "expected a sort name")?;
            let arity = match args.len() {
                1 => 0,
                2 => args[1]
                    .as_numeral()
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| malformed(args[1].pos, "expected a numeral arity"))?,
                _ => return Err(malformed(e.pos, "wrong number of arguments")),
            };
            CommandKind::DeclareSort(name, arity)
        }
        "define-sort" => {
            arity(3)?;
            let name = symbol_arg(&args[0], "expected a sort name")?;
            let params = args[1]
                .as_list()
                .ok_or_else(|| malformed(args[1].pos, "expected a parameter list"))?
                .iter()
                .map(|p| symbol_arg(p, "expected a sort parameter"))
                .collect::<Result<_, _>>()?;
            CommandKind::DefineSort(name, params, Sort::from_sexpr(&args[2])?)
        }
        "declare-fun" => {
            arity(3)?;
            CommandKind::DeclareFun(
                symbol_arg(&args[0], "expected a function name")?,
                sort_list(&args[1])?,
                Sort::from_sexpr(&args[2])?,
            )
        }
        "declare-const" => {
            arity(2)?;
            CommandKind::DeclareFun(
                symbol_arg(&args[0], "expected a constant name")?,
                Vec::new(),
                Sort::from_sexpr(&args[1])?,
            )
        }
        "define-fun" => {
            arity(4)?;
            let name = symbol_arg(&args[0], "expected a function name")?;
            let params = args[1]
                .as_list()
                .ok_or_else(|| malformed(args[1].pos, "expected a parameter list"))?
                .iter()
                .map(|p| match p.as_list() {
                    Some([n, s]) => Ok((symbol_arg(n, "expected a parameter name")?, Sort::from_sexpr(s)?)),
                    _ => Err(malformed(p.pos, "expected (name sort)")),
                })
                .collect::<Result<_, _>>()?;
            CommandKind::DefineFun(name, params, Sort::from_sexpr(&args[2])?, args[3].clone())
        }
        "assert" => {
            let is_true = args.len() == 1 && args[0].as_symbol() == Some("true");
            if !(is_true && is_last) {
                return Err(FrontendError::DisallowedCommand {
                    name: "assert".to_string(),
                    pos: e.pos,
                });
            }
            CommandKind::TrailingAssertTrue
        }
        other => {
            return Err(FrontendError::DisallowedCommand {
                name: other.to_string(),
                pos: e.pos,
            })
        }
    };
    Ok(Command { kind, pos: e.pos })
}

/// Parses a VMT-LIB script into its commands, in document order.
pub fn parse_script(text: &str) -> Result<Vec<Command>, FrontendError> {
    let exprs = parse_sexprs(text)?;
    let n = exprs.len();
    exprs
        .iter()
        .enumerate()
        .map(|(i, e)| parse_command(e, i + 1 == n))
        .collect()
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandKind::SetLogic(l) => {
                f.write_str("(set-logic ")?;
                write_symbol(f, l)?;
                f.write_str(")")
            }
            CommandKind::SetOption(n, v) => {
                write!(f, "(set-option :{}", n)?;
                if let Some(v) = v {
                    write!(f, " {}", v)?;
                }
                f.write_str(")")
            }
            CommandKind::DeclareSort(n, a) => {
                f.write_str("(declare-sort ")?;
                write_symbol(f, n)?;
                write!(f, " {})", a)
            }
            CommandKind::DefineSort(n, ps, body) => {
                f.write_str("(define-sort ")?;
                write_symbol(f, n)?;
                f.write_str(" (")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write_symbol(f, p)?;
                }
                write!(f, ") {})", body)
            }
            CommandKind::DeclareFun(n, args, r) => {
                f.write_str("(declare-fun ")?;
                write_symbol(f, n)?;
                f.write_str(" (")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ") {})", r)
            }
            CommandKind::DefineFun(n, ps, r, body) => {
                f.write_str("(define-fun ")?;
                write_symbol(f, n)?;
                f.write_str(" (")?;
                for (i, (p, s)) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str("(")?;
                    write_symbol(f, p)?;
                    write!(f, " {})", s)?;
                }
                write!(f, ") {} {})", r, body)
            }
            CommandKind::TrailingAssertTrue => f.write_str("(assert true)"),
        }
    }
}

/// Prints commands one per line.
pub fn print_script(cmds: &[Command]) -> String {
    let mut out = String::new();
    for c in cmds {
        out.push_str(&alloc::format!("{}\n", c));
    }
    out
}

/// Whether `e` is the literal `true` symbol.
pub(crate) fn is_true_symbol(e: &SExpr) -> bool {
    matches!(&e.kind, SExprKind::Atom(Atom::Symbol(s)) if s == "true")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn single_declaration() {
        let cmds = parse_script("(declare-fun x () Int)").unwrap();
        assert_eq!(cmds.len(), 1);
        assert_eq!(cmds[0].kind, CommandKind::DeclareFun("x".into(), vec![], Sort::Int));
    }

    #[test]
    fn push_is_disallowed() {
        let err = parse_script("(set-logic QF_LIA)\n(push 1)").unwrap_err();
        assert_eq!(
            err,
            FrontendError::DisallowedCommand {
                name: "push".into(),
                pos: Pos::new(2, 1)
            }
        );
    }

    #[test]
    fn assert_true_only_at_end() {
        assert!(parse_script("(declare-fun x () Int)\n(assert true)").is_ok());
        assert!(matches!(
            parse_script("(assert true)\n(declare-fun x () Int)"),
            Err(FrontendError::DisallowedCommand { .. })
        ));
        assert!(matches!(
            parse_script("(declare-fun x () Bool)\n(assert x)"),
            Err(FrontendError::DisallowedCommand { .. })
        ));
    }

    #[test]
    fn declare_const_is_sugar() {
        let a = parse_script("(declare-const x Int)").unwrap();
        let b = parse_script("(declare-fun x () Int)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn commands_print_back() {
        let text = "(set-logic QF_LIA)\n(set-option :produce-models true)\n(declare-sort U 0)\n(define-sort B () (_ BitVec 8))\n(declare-fun f (Int U) Bool)\n(define-fun g ((a Int)) Int (+ a 1))\n(assert true)\n";
        let cmds = parse_script(text).unwrap();
        assert_eq!(print_script(&cmds), text);
    }

    #[test]
    fn every_listed_disallowed_command_is_rejected() {
        for name in DISALLOWED_COMMANDS {
            let text = format!("({} 1)\n(declare-fun x () Int)", name);
            match parse_script(&text) {
                Err(FrontendError::DisallowedCommand { name: n, .. }) => assert_eq!(n, *name),
                other => panic!("{name}: {other:?}"),
            }
        }
    }
}
