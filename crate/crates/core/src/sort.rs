use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::FrontendError;
use crate::sexpr::{write_symbol, Atom, SExpr, SExprKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Bool,
    Int,
    Real,
    BitVec(u32),
    Array(Box<Sort>, Box<Sort>),
    /// A sort introduced by `declare-sort` (or, before alias resolution, any
    /// sort symbol that is not built in), applied to its arguments.
    Uninterpreted(String, Vec<Sort>),
}

impl Sort {
    pub fn array(index: Sort, element: Sort) -> Sort {
        Sort::Array(Box::new(index), Box::new(element))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Sort::Bool)
    }

    pub fn is_arith(&self) -> bool {
        matches!(self, Sort::Int | Sort::Real)
    }

    pub fn bv_width(&self) -> Option<u32> {
        match self {
            Sort::BitVec(w) => Some(*w),
            _ => None,
        }
    }

    /// Reads a sort without resolving user sort names.
    pub fn from_sexpr(e: &SExpr) -> Result<Sort, FrontendError> {
        match &e.kind {
            SExprKind::Atom(Atom::Symbol(s)) => Ok(match s.as_str() {
                "Bool" => Sort::Bool,
                "Int" => Sort::Int,
                "Real" => Sort::Real,
                _ => Sort::Uninterpreted(s.clone(), Vec::new()),
            }),
            SExprKind::List(items) if !items.is_empty() => {
                let head = items[0].as_symbol();
                match head {
                    Some("_") => {
                        if items.len() == 3 && items[1].as_symbol() == Some("BitVec") {
                            let w: u32 = items[2]
                                .as_numeral()
                                .and_then(|n| n.parse().ok())
                                .ok_or_else(|| invalid(e, "bad bit-vector width"))?;
                            if w == 0 {
                                return Err(invalid(e, "bit-vector width must be at least 1"));
                            }
                            Ok(Sort::BitVec(w))
                        } else {
                            Err(invalid(e, "unknown indexed sort"))
                        }
                    }
                    Some("Array") if items.len() == 3 => Ok(Sort::array(
                        Sort::from_sexpr(&items[1])?,
                        Sort::from_sexpr(&items[2])?,
                    )),
                    Some(name) if items.len() > 1 && !matches!(name, "Bool" | "Int" | "Real" | "Array") => {
                        let args = items[1..].iter().map(Sort::from_sexpr).collect::<Result<_, _>>()?;
                        Ok(Sort::Uninterpreted(name.to_string(), args))
                    }
                    _ => Err(invalid(e, "malformed sort")),
                }
            }
            _ => Err(invalid(e, "malformed sort")),
        }
    }

    /// Replaces sort parameters (written as nullary uninterpreted sorts).
    pub fn substitute(&self, params: &[String], args: &[Sort]) -> Sort {
        match self {
            Sort::Uninterpreted(n, a) if a.is_empty() => match params.iter().position(|p| p == n) {
                Some(i) => args[i].clone(),
                None => self.clone(),
            },
            Sort::Uninterpreted(n, a) => {
                Sort::Uninterpreted(n.clone(), a.iter().map(|s| s.substitute(params, args)).collect())
            }
            Sort::Array(i, e) => Sort::array(i.substitute(params, args), e.substitute(params, args)),
            other => other.clone(),
        }
    }

    /// Names of user sorts occurring in this sort.
    pub fn user_sorts(&self, out: &mut Vec<String>) {
        match self {
            Sort::Uninterpreted(n, a) => {
                out.push(n.clone());
                for s in a {
                    s.user_sorts(out);
                }
            }
            Sort::Array(i, e) => {
                i.user_sorts(out);
                e.user_sorts(out);
            }
            _ => {}
        }
    }
}

fn invalid(e: &SExpr, reason: &str) -> FrontendError {
    FrontendError::InvalidSort {
        reason: reason.to_string(),
        pos: e.pos,
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Int => f.write_str("Int"),
            Sort::Real => f.write_str("Real"),
            Sort::BitVec(w) => write!(f, "(_ BitVec {})", w),
            Sort::Array(i, e) => write!(f, "(Array {} {})", i, e),
            Sort::Uninterpreted(n, args) if args.is_empty() => write_symbol(f, n),
            Sort::Uninterpreted(n, args) => {
                f.write_str("(")?;
                write_symbol(f, n)?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_sexpr;
    use alloc::format;

    fn sort(text: &str) -> Result<Sort, FrontendError> {
        Sort::from_sexpr(&parse_sexpr(text).unwrap())
    }

    #[test]
    fn builtin_sorts_round_trip() {
        for text in ["Bool", "Int", "Real", "(_ BitVec 8)", "(Array Int (_ BitVec 4))", "(List Int)", "U"] {
            assert_eq!(format!("{}", sort(text).unwrap()), text);
        }
    }

    #[test]
    fn zero_width_bitvec_is_rejected() {
        assert!(matches!(sort("(_ BitVec 0)"), Err(FrontendError::InvalidSort { .. })));
    }
}
