//! Ground values and the evaluation of theory operators on them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::sort::Sort;
use crate::term::{bv_mask, BvConst, Constant, Op, Term};

/// Largest index width for which arrays get a dense representation.
pub const MAX_ARRAY_INDEX_WIDTH: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Int(i128),
    BitVec(BvConst),
    /// An array over a finite index sort, one element per index in
    /// ascending order (`false < true`, bit-vectors by unsigned value).
    Array(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Unsupported(String),
    Overflow,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unsupported(what) => write!(f, "unsupported: {}", what),
            EvalError::Overflow => f.write_str("integer overflow"),
        }
    }
}

fn unsupported<T>(what: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Unsupported(what.into()))
}

/// Number of elements of a finite array index sort.
pub fn index_domain_size(index: &Sort) -> Option<usize> {
    match index {
        Sort::Bool => Some(2),
        Sort::BitVec(w) if *w <= MAX_ARRAY_INDEX_WIDTH => Some(1usize << w),
        _ => None,
    }
}

/// The `i`-th value of a finite index sort.
pub fn index_value(index: &Sort, i: usize) -> Value {
    match index {
        Sort::Bool => Value::Bool(i == 1),
        Sort::BitVec(w) => Value::BitVec(BvConst::new(*w, i as u128)),
        _ => unreachable!("not a finite index sort"),
    }
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i128> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bv(&self) -> Option<BvConst> {
        match self {
            Value::BitVec(b) => Some(*b),
            _ => None,
        }
    }

    /// Position of this value in its finite index sort.
    pub fn ordinal(&self) -> Option<usize> {
        match self {
            Value::Bool(b) => Some(*b as usize),
            Value::BitVec(b) if b.width <= MAX_ARRAY_INDEX_WIDTH => Some(b.value as usize),
            _ => None,
        }
    }

    /// The value as a constant term of the given sort.
    pub fn to_term(&self, sort: &Sort) -> Term {
        match (self, sort) {
            (Value::Bool(b), _) => Term::bool(*b),
            (Value::Int(n), _) => Term::int(*n),
            (Value::BitVec(b), _) => Term::Const(Constant::BitVec(*b)),
            (Value::Array(elems), Sort::Array(i, e)) => {
                // Most frequent element as the base, explicit stores for the rest.
                let mut best = &elems[0];
                let mut best_count = 0;
                for cand in elems {
                    let c = elems.iter().filter(|x| *x == cand).count();
                    if c > best_count {
                        best = cand;
                        best_count = c;
                    }
                }
                let mut t = Term::App(Op::ConstArray(sort.clone()), alloc::vec![best.to_term(e)], sort.clone());
                for (k, v) in elems.iter().enumerate() {
                    if v != best {
                        t = Term::App(
                            Op::Store,
                            alloc::vec![t, index_value(i, k).to_term(i), v.to_term(e)],
                            sort.clone(),
                        );
                    }
                }
                t
            }
            (Value::Array(_), _) => unreachable!("array value with a non-array sort"),
        }
    }

    /// Evaluates a ground term built from constants, theory operators and
    /// array constants.
    pub fn from_term(t: &Term) -> Result<Value, EvalError> {
        match t {
            Term::Const(c) => Value::from_constant(c),
            Term::App(op, args, _) => {
                let vals = args.iter().map(Value::from_term).collect::<Result<Vec<_>, _>>()?;
                apply(op, &vals)
            }
            Term::Annot(t, _) => Value::from_term(t),
            _ => unsupported(format!("non-ground term {}", t)),
        }
    }

    pub fn from_constant(c: &Constant) -> Result<Value, EvalError> {
        Ok(match c {
            Constant::Bool(b) => Value::Bool(*b),
            Constant::Int(n) => Value::Int(*n),
            Constant::BitVec(b) => Value::BitVec(*b),
            Constant::Real(_) => return unsupported("real arithmetic"),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", b),
            Value::Int(n) => write!(f, "{}", Constant::Int(*n)),
            Value::BitVec(b) => write!(f, "{}", b),
            Value::Array(elems) => {
                f.write_str("[")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", e)?;
                }
                f.write_str("]")
            }
        }
    }
}

fn bools(args: &[Value]) -> Result<Vec<bool>, EvalError> {
    args.iter()
        .map(|v| v.as_bool().ok_or_else(|| EvalError::Unsupported("expected Bool".to_string())))
        .collect()
}

fn ints(args: &[Value]) -> Result<Vec<i128>, EvalError> {
    args.iter()
        .map(|v| v.as_int().ok_or_else(|| EvalError::Unsupported("expected Int".to_string())))
        .collect()
}

fn bvs(args: &[Value]) -> Result<Vec<BvConst>, EvalError> {
    args.iter()
        .map(|v| v.as_bv().ok_or_else(|| EvalError::Unsupported("expected a bit-vector".to_string())))
        .collect()
}

fn chain(args: &[Value], rel: impl Fn(i128, i128) -> bool) -> Result<Value, EvalError> {
    let xs = ints(args)?;
    Ok(Value::Bool(xs.windows(2).all(|w| rel(w[0], w[1]))))
}

fn fold_int(args: &[Value], f: impl Fn(i128, i128) -> Option<i128>) -> Result<Value, EvalError> {
    let xs = ints(args)?;
    let mut acc = xs[0];
    for x in &xs[1..] {
        acc = f(acc, *x).ok_or(EvalError::Overflow)?;
    }
    Ok(Value::Int(acc))
}

fn fold_bv(args: &[Value], f: impl Fn(BvConst, BvConst) -> BvConst) -> Result<Value, EvalError> {
    let xs = bvs(args)?;
    let mut acc = xs[0];
    for x in &xs[1..] {
        acc = f(acc, *x);
    }
    Ok(Value::BitVec(acc))
}

/// Applies a theory operator to argument values of fitting sorts.
pub fn apply(op: &Op, args: &[Value]) -> Result<Value, EvalError> {
    use Op::*;
    let b = |x: bool| Ok(Value::Bool(x));
    match op {
        Not => b(!bools(args)?[0]),
        And => b(bools(args)?.iter().all(|x| *x)),
        Or => b(bools(args)?.iter().any(|x| *x)),
        Xor => b(bools(args)?.iter().fold(false, |a, x| a ^ x)),
        Implies => {
            let xs = bools(args)?;
            // right associative
            let mut acc = xs[xs.len() - 1];
            for x in xs[..xs.len() - 1].iter().rev() {
                acc = !x || acc;
            }
            b(acc)
        }
        Eq => b(args.windows(2).all(|w| w[0] == w[1])),
        Distinct => {
            for i in 0..args.len() {
                for j in i + 1..args.len() {
                    if args[i] == args[j] {
                        return b(false);
                    }
                }
            }
            b(true)
        }
        Ite => Ok(if bools(&args[..1])?[0] { args[1].clone() } else { args[2].clone() }),
        Add => fold_int(args, i128::checked_add),
        Sub => fold_int(args, i128::checked_sub),
        Mul => fold_int(args, i128::checked_mul),
        Neg => Ok(Value::Int(ints(args)?[0].checked_neg().ok_or(EvalError::Overflow)?)),
        Abs => Ok(Value::Int(ints(args)?[0].checked_abs().ok_or(EvalError::Overflow)?)),
        IntDiv | Mod => {
            let xs = ints(args)?;
            let mut acc = xs[0];
            for d in &xs[1..] {
                if *d == 0 {
                    return unsupported("integer division by zero");
                }
                acc = if *op == IntDiv {
                    acc.checked_div_euclid(*d)
                } else {
                    acc.checked_rem_euclid(*d)
                }
                .ok_or(EvalError::Overflow)?;
            }
            Ok(Value::Int(acc))
        }
        Le => chain(args, |a, c| a <= c),
        Lt => chain(args, |a, c| a < c),
        Ge => chain(args, |a, c| a >= c),
        Gt => chain(args, |a, c| a > c),
        RealDiv | ToReal | ToInt | IsInt => unsupported("real arithmetic"),
        Concat => fold_bv(args, |hi, lo| BvConst::new(hi.width + lo.width, (hi.value << lo.width) | lo.value)),
        Extract(i, j) => {
            let x = bvs(args)?[0];
            Ok(Value::BitVec(BvConst::new(i - j + 1, x.value >> j)))
        }
        BvNot => {
            let x = bvs(args)?[0];
            Ok(Value::BitVec(BvConst::new(x.width, !x.value)))
        }
        BvNeg => {
            let x = bvs(args)?[0];
            Ok(Value::BitVec(BvConst::new(x.width, x.value.wrapping_neg())))
        }
        BvAnd => fold_bv(args, |a, c| BvConst::new(a.width, a.value & c.value)),
        BvOr => fold_bv(args, |a, c| BvConst::new(a.width, a.value | c.value)),
        BvXor => fold_bv(args, |a, c| BvConst::new(a.width, a.value ^ c.value)),
        BvAdd => fold_bv(args, |a, c| BvConst::new(a.width, a.value.wrapping_add(c.value))),
        BvMul => fold_bv(args, |a, c| BvConst::new(a.width, a.value.wrapping_mul(c.value))),
        BvNand | BvNor | BvXnor | BvSub | BvUdiv | BvUrem | BvSdiv | BvSrem | BvSmod | BvShl | BvLshr
        | BvAshr | BvComp => {
            let xs = bvs(args)?;
            Ok(Value::BitVec(bv_binary(op, xs[0], xs[1])))
        }
        BvUlt | BvUle | BvUgt | BvUge | BvSlt | BvSle | BvSgt | BvSge => {
            let xs = bvs(args)?;
            let (a, c) = (xs[0], xs[1]);
            b(match op {
                BvUlt => a.value < c.value,
                BvUle => a.value <= c.value,
                BvUgt => a.value > c.value,
                BvUge => a.value >= c.value,
                BvSlt => a.signed() < c.signed(),
                BvSle => a.signed() <= c.signed(),
                BvSgt => a.signed() > c.signed(),
                _ => a.signed() >= c.signed(),
            })
        }
        ZeroExtend(i) => {
            let x = bvs(args)?[0];
            if x.width + i > crate::term::MAX_CONST_WIDTH {
                return unsupported("bit-vectors wider than 128 bits");
            }
            Ok(Value::BitVec(BvConst::new(x.width + i, x.value)))
        }
        SignExtend(i) => {
            let x = bvs(args)?[0];
            if x.width + i > crate::term::MAX_CONST_WIDTH {
                return unsupported("bit-vectors wider than 128 bits");
            }
            Ok(Value::BitVec(BvConst::new(x.width + i, x.signed() as u128)))
        }
        RotateLeft(i) | RotateRight(i) => {
            let x = bvs(args)?[0];
            let w = x.width;
            let left = match op {
                RotateLeft(_) => i % w,
                _ => (w - i % w) % w,
            };
            if left == 0 {
                return Ok(Value::BitVec(x));
            }
            Ok(Value::BitVec(BvConst::new(w, (x.value << left) | (x.value >> (w - left)))))
        }
        Repeat(i) => {
            let x = bvs(args)?[0];
            if x.width * i > crate::term::MAX_CONST_WIDTH {
                return unsupported("bit-vectors wider than 128 bits");
            }
            let mut v = 0u128;
            for _ in 0..*i {
                v = (v << x.width) | x.value;
            }
            Ok(Value::BitVec(BvConst::new(x.width * i, v)))
        }
        Select => match (&args[0], args[1].ordinal()) {
            (Value::Array(elems), Some(k)) if k < elems.len() => Ok(elems[k].clone()),
            _ => unsupported("array index outside a finite domain"),
        },
        Store => match (&args[0], args[1].ordinal()) {
            (Value::Array(elems), Some(k)) if k < elems.len() => {
                let mut elems = elems.clone();
                elems[k] = args[2].clone();
                Ok(Value::Array(elems))
            }
            _ => unsupported("array index outside a finite domain"),
        },
        ConstArray(s) => match s {
            Sort::Array(i, _) => match index_domain_size(i) {
                Some(n) => Ok(Value::Array(alloc::vec![args[0].clone(); n])),
                None => unsupported(format!("arrays indexed by {}", i)),
            },
            _ => unsupported("constant array of a non-array sort"),
        },
        Uf(n) => unsupported(format!("uninterpreted function `{}`", n)),
        Macro(n) => unsupported(format!("unexpanded definition `{}`", n)),
    }
}

/// Binary bit-vector operators with SMT-LIB semantics (including the
/// defined results of division by zero).
pub fn bv_binary(op: &Op, a: BvConst, c: BvConst) -> BvConst {
    use Op::*;
    let w = a.width;
    let mask = bv_mask(w);
    let neg = |x: u128| x.wrapping_neg() & mask;
    let udiv = |x: u128, y: u128| if y == 0 { mask } else { x / y };
    let urem = |x: u128, y: u128| if y == 0 { x } else { x % y };
    let msb = |x: u128| (x >> (w - 1)) & 1 == 1;
    let v = match op {
        BvNand => !(a.value & c.value),
        BvNor => !(a.value | c.value),
        BvXnor => !(a.value ^ c.value),
        BvSub => a.value.wrapping_sub(c.value),
        BvUdiv => udiv(a.value, c.value),
        BvUrem => urem(a.value, c.value),
        BvSdiv => match (msb(a.value), msb(c.value)) {
            (false, false) => udiv(a.value, c.value),
            (true, false) => neg(udiv(neg(a.value), c.value)),
            (false, true) => neg(udiv(a.value, neg(c.value))),
            (true, true) => udiv(neg(a.value), neg(c.value)),
        },
        BvSrem => match (msb(a.value), msb(c.value)) {
            (false, false) => urem(a.value, c.value),
            (true, false) => neg(urem(neg(a.value), c.value)),
            (false, true) => urem(a.value, neg(c.value)),
            (true, true) => neg(urem(neg(a.value), neg(c.value))),
        },
        BvSmod => {
            let abs_a = if msb(a.value) { neg(a.value) } else { a.value };
            let abs_c = if msb(c.value) { neg(c.value) } else { c.value };
            let u = urem(abs_a, abs_c);
            if u == 0 {
                u
            } else {
                match (msb(a.value), msb(c.value)) {
                    (false, false) => u,
                    (true, false) => neg(u).wrapping_add(c.value),
                    (false, true) => u.wrapping_add(c.value),
                    (true, true) => neg(u),
                }
            }
        }
        BvShl => {
            if c.value >= w as u128 {
                0
            } else {
                a.value << c.value
            }
        }
        BvLshr => {
            if c.value >= w as u128 {
                0
            } else {
                a.value >> c.value
            }
        }
        BvAshr => {
            let sign = msb(a.value);
            if c.value >= w as u128 {
                if sign {
                    mask
                } else {
                    0
                }
            } else {
                let shifted = a.value >> c.value;
                if sign {
                    shifted | (mask & !(mask >> c.value))
                } else {
                    shifted
                }
            }
        }
        BvComp => return BvConst::new(1, (a.value == c.value) as u128),
        _ => unreachable!("not a binary bit-vector operator: {}", op),
    };
    BvConst::new(w, v)
}

/// All values of a finite sort; `int_range` is used for `Int`.
pub fn enumerate_sort(sort: &Sort, int_range: Option<(i128, i128)>, max_bv_width: u32) -> Result<Vec<Value>, EvalError> {
    match sort {
        Sort::Bool => Ok(alloc::vec![Value::Bool(false), Value::Bool(true)]),
        Sort::Int => match int_range {
            Some((lo, hi)) => Ok((lo..=hi).map(Value::Int).collect()),
            None => unsupported("Int variable without bounds"),
        },
        Sort::BitVec(w) if *w <= max_bv_width => {
            Ok((0..(1u128 << w)).map(|v| Value::BitVec(BvConst::new(*w, v))).collect())
        }
        Sort::BitVec(w) => unsupported(format!("bit-vectors wider than {} bits (found {})", max_bv_width, w)),
        Sort::Array(i, e) => {
            let n = index_domain_size(i).ok_or_else(|| EvalError::Unsupported(format!("arrays indexed by {}", i)))?;
            let elems = enumerate_sort(e, int_range, max_bv_width)?;
            let total = (elems.len() as u128).checked_pow(n as u32);
            if total.map_or(true, |t| t > 1 << 16) {
                return unsupported(format!("array sort {} has too many values", sort));
            }
            let mut out: Vec<Vec<Value>> = alloc::vec![Vec::new()];
            for _ in 0..n {
                let mut next = Vec::with_capacity(out.len() * elems.len());
                for prefix in &out {
                    for e in &elems {
                        let mut p = prefix.clone();
                        p.push(e.clone());
                        next.push(p);
                    }
                }
                out = next;
            }
            Ok(out.into_iter().map(Value::Array).collect())
        }
        Sort::Real => unsupported("real arithmetic"),
        Sort::Uninterpreted(n, _) => unsupported(format!("uninterpreted sort `{}`", n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bv(w: u32, v: u128) -> BvConst {
        BvConst::new(w, v)
    }

    #[test]
    fn division_by_zero_follows_smtlib() {
        assert_eq!(bv_binary(&Op::BvUdiv, bv(4, 5), bv(4, 0)), bv(4, 15));
        assert_eq!(bv_binary(&Op::BvUrem, bv(4, 5), bv(4, 0)), bv(4, 5));
        // -3 sdiv 0 = 1 (negated all-ones)
        assert_eq!(bv_binary(&Op::BvSdiv, bv(4, 13), bv(4, 0)), bv(4, 1));
    }

    #[test]
    fn signed_division_matches_truncation() {
        for a in 0..16u128 {
            for c in 1..16u128 {
                let (x, y) = (bv(4, a), bv(4, c));
                let (sa, sc) = (x.signed(), y.signed());
                if sa == -8 && sc == -1 {
                    continue;
                }
                assert_eq!(bv_binary(&Op::BvSdiv, x, y).signed(), sa / sc, "{sa} / {sc}");
                assert_eq!(bv_binary(&Op::BvSrem, x, y).signed(), sa % sc, "{sa} % {sc}");
                let m = bv_binary(&Op::BvSmod, x, y).signed();
                assert_eq!((m - sa).rem_euclid(sc.abs()), 0);
                assert!(m == 0 || (m < 0) == (sc < 0));
            }
        }
    }

    #[test]
    fn shifts_and_rotations() {
        assert_eq!(bv_binary(&Op::BvAshr, bv(4, 0b1000), bv(4, 2)), bv(4, 0b1110));
        assert_eq!(bv_binary(&Op::BvShl, bv(4, 0b0011), bv(4, 5)), bv(4, 0));
        let r = apply(&Op::RotateLeft(1), &[Value::BitVec(bv(4, 0b1001))]).unwrap();
        assert_eq!(r, Value::BitVec(bv(4, 0b0011)));
    }

    #[test]
    fn euclidean_integer_division() {
        let d = apply(&Op::IntDiv, &[Value::Int(-7), Value::Int(2)]).unwrap();
        let m = apply(&Op::Mod, &[Value::Int(-7), Value::Int(2)]).unwrap();
        assert_eq!((d, m), (Value::Int(-4), Value::Int(1)));
    }

    #[test]
    fn arrays_round_trip_through_terms() {
        let sort = Sort::array(Sort::BitVec(2), Sort::Bool);
        let v = Value::Array(vec![Value::Bool(false), Value::Bool(true), Value::Bool(false), Value::Bool(false)]);
        let t = v.to_term(&sort);
        assert_eq!(Value::from_term(&t).unwrap(), v);
        assert_eq!(enumerate_sort(&sort, None, 8).unwrap().len(), 16);
    }

    #[test]
    fn unbounded_int_cannot_be_enumerated() {
        assert!(enumerate_sort(&Sort::Int, None, 8).is_err());
    }
}
