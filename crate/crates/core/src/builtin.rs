//! Fallback solver for quantifier-free Bool and bit-vector queries, by
//! bit-blasting into the CDCL core.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bmc::{CheckResult, Model, Query, Solver, SolverError};
use crate::sat::{Lit, SatSolver};
use crate::sort::Sort;
use crate::term::{Constant, Op, Term};

/// Solves Bool/bit-vector queries without an external process. Anything
/// else (integers, reals, arrays, declared functions, quantifiers) is
/// reported as [`SolverError::Unsupported`].
#[derive(Debug, Default, Clone, Copy)]
pub struct BuiltinSolver;

impl Solver for BuiltinSolver {
    fn check(&mut self, query: &Query) -> Result<CheckResult, SolverError> {
        let mut bb = Blaster::new();
        for (name, args, sort) in &query.declarations {
            if !args.is_empty() {
                return Err(SolverError::Unsupported(format!("declared function `{}`", name)));
            }
            let bits = match sort {
                Sort::Bool => Bits::Bool(bb.fresh()),
                Sort::BitVec(w) => Bits::Bv((0..*w).map(|_| bb.fresh()).collect()),
                other => return Err(SolverError::Unsupported(format!("sort {}", other))),
            };
            bb.vars.insert(name.clone(), bits);
        }
        for a in &query.assertions {
            let l = bb.bool_term(a)?;
            bb.sat.add_clause(&[l]);
        }
        if !bb.sat.solve() {
            return Ok(CheckResult::Unsat);
        }
        let mut model = Model::default();
        for name in &query.values {
            let v = match bb.vars.get(name) {
                Some(Bits::Bool(l)) => Term::bool(bb.lit_value(*l)),
                Some(Bits::Bv(ls)) => {
                    let mut value = 0u128;
                    for (i, l) in ls.iter().enumerate() {
                        if bb.lit_value(*l) {
                            value |= 1 << i;
                        }
                    }
                    Term::bv(ls.len() as u32, value)
                }
                None => return Err(SolverError::Unsupported(format!("value of undeclared `{}`", name))),
            };
            model.values.insert(name.clone(), v);
        }
        Ok(CheckResult::Sat(model))
    }
}

#[derive(Debug, Clone)]
enum Bits {
    Bool(Lit),
    /// Least significant bit first.
    Bv(Vec<Lit>),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Gate {
    And(Lit, Lit),
    Xor(Lit, Lit),
    Ite(Lit, Lit, Lit),
}

struct Blaster {
    sat: SatSolver,
    tt: Lit,
    gates: BTreeMap<Gate, Lit>,
    vars: BTreeMap<String, Bits>,
    lets: Vec<(String, Bits)>,
}

fn unsupported<T>(what: impl Into<String>) -> Result<T, SolverError> {
    Err(SolverError::Unsupported(what.into()))
}

impl Blaster {
    fn new() -> Self {
        let mut sat = SatSolver::new();
        let v = sat.new_var();
        let tt = Lit::new(v, false);
        sat.add_clause(&[tt]);
        Blaster {
            sat,
            tt,
            gates: BTreeMap::new(),
            vars: BTreeMap::new(),
            lets: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Lit {
        Lit::new(self.sat.new_var(), false)
    }

    fn ff(&self) -> Lit {
        !self.tt
    }

    fn constant(&self, b: bool) -> Lit {
        if b {
            self.tt
        } else {
            self.ff()
        }
    }

    fn lit_value(&self, l: Lit) -> bool {
        self.sat.model_value(l.var()) != l.is_negated()
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if a == self.ff() || b == self.ff() || a == !b {
            return self.ff();
        }
        if a == self.tt || a == b {
            return b;
        }
        if b == self.tt {
            return a;
        }
        let key = Gate::And(a.min(b), a.max(b));
        if let Some(g) = self.gates.get(&key) {
            return *g;
        }
        let g = self.fresh();
        self.sat.add_clause(&[!g, a]);
        self.sat.add_clause(&[!g, b]);
        self.sat.add_clause(&[g, !a, !b]);
        self.gates.insert(key, g);
        g
    }

    fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        if a == self.ff() {
            return b;
        }
        if b == self.ff() {
            return a;
        }
        if a == self.tt {
            return !b;
        }
        if b == self.tt {
            return !a;
        }
        if a == b {
            return self.ff();
        }
        if a == !b {
            return self.tt;
        }
        // normalize polarity so that equal gates share one variable
        let flip = a.is_negated() != b.is_negated();
        let (x, y) = (Lit::new(a.var(), false), Lit::new(b.var(), false));
        let key = Gate::Xor(x.min(y), x.max(y));
        let g = match self.gates.get(&key) {
            Some(g) => *g,
            None => {
                let g = self.fresh();
                self.sat.add_clause(&[!g, x, y]);
                self.sat.add_clause(&[!g, !x, !y]);
                self.sat.add_clause(&[g, !x, y]);
                self.sat.add_clause(&[g, x, !y]);
                self.gates.insert(key, g);
                g
            }
        };
        if flip {
            !g
        } else {
            g
        }
    }

    fn iff(&mut self, a: Lit, b: Lit) -> Lit {
        !self.xor(a, b)
    }

    fn ite(&mut self, c: Lit, a: Lit, b: Lit) -> Lit {
        if c == self.tt || a == b {
            return a;
        }
        if c == self.ff() {
            return b;
        }
        if a == self.tt {
            return self.or(c, b);
        }
        if a == self.ff() {
            let nc = !c;
            return self.and(nc, b);
        }
        if b == self.tt {
            let nc = !c;
            return self.or(nc, a);
        }
        if b == self.ff() {
            return self.and(c, a);
        }
        let key = Gate::Ite(c, a, b);
        if let Some(g) = self.gates.get(&key) {
            return *g;
        }
        let g = self.fresh();
        self.sat.add_clause(&[!c, !a, g]);
        self.sat.add_clause(&[!c, a, !g]);
        self.sat.add_clause(&[c, !b, g]);
        self.sat.add_clause(&[c, b, !g]);
        self.gates.insert(key, g);
        g
    }

    fn and_all(&mut self, ls: &[Lit]) -> Lit {
        let mut acc = self.tt;
        for l in ls {
            acc = self.and(acc, *l);
        }
        acc
    }

    // ---- bit-vector circuits ----

    fn bv_const(&self, width: u32, value: u128) -> Vec<Lit> {
        (0..width).map(|i| self.constant((value >> i) & 1 == 1)).collect()
    }

    fn bv_ite(&mut self, c: Lit, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        a.iter().zip(b).map(|(x, y)| self.ite(c, *x, *y)).collect()
    }

    fn bv_eq(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let bits: Vec<Lit> = a.iter().zip(b).map(|(x, y)| self.iff(*x, *y)).collect();
        self.and_all(&bits)
    }

    fn add_with_carry(&mut self, a: &[Lit], b: &[Lit], mut carry: Lit) -> Vec<Lit> {
        let mut out = Vec::with_capacity(a.len());
        for (x, y) in a.iter().zip(b) {
            let t = self.xor(*x, *y);
            out.push(self.xor(t, carry));
            let c1 = self.and(*x, *y);
            let c2 = self.and(t, carry);
            carry = self.or(c1, c2);
        }
        out
    }

    fn bv_add(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let ff = self.ff();
        self.add_with_carry(a, b, ff)
    }

    fn bv_sub(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let nb: Vec<Lit> = b.iter().map(|l| !*l).collect();
        let tt = self.tt;
        self.add_with_carry(a, &nb, tt)
    }

    fn bv_neg(&mut self, a: &[Lit]) -> Vec<Lit> {
        let zero = self.bv_const(a.len() as u32, 0);
        self.bv_sub(&zero, a)
    }

    fn bv_mul(&mut self, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let w = a.len();
        let mut acc = self.bv_const(w as u32, 0);
        for (i, bi) in b.iter().enumerate() {
            let mut partial = self.bv_const(i as u32, 0);
            for x in &a[..w - i] {
                partial.push(self.and(*x, *bi));
            }
            acc = self.bv_add(&acc, &partial);
        }
        acc
    }

    /// Unsigned `a < b`.
    fn bv_ult(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut lt = self.ff();
        for (x, y) in a.iter().zip(b) {
            // from LSB to MSB: the higher bit decides unless equal
            let here = self.and(!*x, *y);
            let same = self.iff(*x, *y);
            let keep = self.and(same, lt);
            lt = self.or(here, keep);
        }
        lt
    }

    fn bv_slt(&mut self, a: &[Lit], b: &[Lit]) -> Lit {
        let mut a2 = a.to_vec();
        let mut b2 = b.to_vec();
        let top = a.len() - 1;
        a2[top] = !a2[top];
        b2[top] = !b2[top];
        self.bv_ult(&a2, &b2)
    }

    /// Restoring division; division by zero gives all ones and remainder `a`.
    fn bv_udivrem(&mut self, a: &[Lit], b: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let w = a.len();
        let ff = self.ff();
        let mut rem = self.bv_const(w as u32, 0);
        let mut quot = vec![ff; w];
        let mut b_ext = b.to_vec();
        b_ext.push(ff);
        for i in (0..w).rev() {
            // r = rem << 1 | a_i, w + 1 bits
            let mut r = Vec::with_capacity(w + 1);
            r.push(a[i]);
            r.extend_from_slice(&rem);
            let lt = self.bv_ult(&r, &b_ext);
            let ge = !lt;
            quot[i] = ge;
            let diff = self.bv_sub(&r, &b_ext);
            let next = self.bv_ite(ge, &diff, &r);
            rem = next[..w].to_vec();
        }
        (quot, rem)
    }

    fn bv_shift(&mut self, a: &[Lit], b: &[Lit], op: &Op) -> Vec<Lit> {
        let w = a.len();
        let sign = a[w - 1];
        let fill = if *op == Op::BvAshr { sign } else { self.ff() };
        let mut cur = a.to_vec();
        let mut stage = 0;
        while (1usize << stage) < w && stage < b.len() {
            let k = 1usize << stage;
            let shifted: Vec<Lit> = (0..w)
                .map(|i| match op {
                    Op::BvShl => {
                        if i >= k {
                            cur[i - k]
                        } else {
                            self.ff()
                        }
                    }
                    _ => {
                        if i + k < w {
                            cur[i + k]
                        } else {
                            fill
                        }
                    }
                })
                .collect();
            cur = self.bv_ite(b[stage], &shifted, &cur);
            stage += 1;
        }
        // shift amounts of at least w
        let wconst = self.bv_const(b.len() as u32, w as u128);
        let in_range = if b.len() < 128 && (w as u128) >= (1u128 << b.len()) {
            self.tt
        } else {
            self.bv_ult(b, &wconst)
        };
        let filled = vec![fill; w];
        self.bv_ite(in_range, &cur, &filled)
    }

    // ---- term translation ----

    fn bool_term(&mut self, t: &Term) -> Result<Lit, SolverError> {
        match self.term(t)? {
            Bits::Bool(l) => Ok(l),
            Bits::Bv(_) => unsupported("bit-vector where Bool was expected"),
        }
    }

    fn bv_term(&mut self, t: &Term) -> Result<Vec<Lit>, SolverError> {
        match self.term(t)? {
            Bits::Bv(b) => Ok(b),
            Bits::Bool(_) => unsupported("Bool where a bit-vector was expected"),
        }
    }

    fn term(&mut self, t: &Term) -> Result<Bits, SolverError> {
        match t {
            Term::Var(n, _) => {
                if let Some((_, b)) = self.lets.iter().rev().find(|(m, _)| m == n) {
                    return Ok(b.clone());
                }
                self.vars
                    .get(n)
                    .cloned()
                    .ok_or_else(|| SolverError::Unsupported(format!("undeclared symbol `{}`", n)))
            }
            Term::Const(Constant::Bool(b)) => Ok(Bits::Bool(self.constant(*b))),
            Term::Const(Constant::BitVec(b)) => Ok(Bits::Bv(self.bv_const(b.width, b.value))),
            Term::Const(c) => unsupported(format!("constant {}", c)),
            Term::Let(bs, body) => {
                let vals = bs
                    .iter()
                    .map(|(n, v)| Ok((n.clone(), self.term(v)?)))
                    .collect::<Result<Vec<_>, SolverError>>()?;
                let depth = self.lets.len();
                self.lets.extend(vals);
                let r = self.term(body);
                self.lets.truncate(depth);
                r
            }
            Term::Quant(..) => unsupported("quantifiers"),
            Term::Annot(inner, _) => self.term(inner),
            Term::App(op, args, sort) => self.app(op, args, sort),
        }
    }

    fn app(&mut self, op: &Op, args: &[Term], sort: &Sort) -> Result<Bits, SolverError> {
        use Op::*;
        let bool_args = |s: &mut Self| args.iter().map(|a| s.bool_term(a)).collect::<Result<Vec<_>, _>>();
        let bv_args = |s: &mut Self| args.iter().map(|a| s.bv_term(a)).collect::<Result<Vec<_>, _>>();
        let b = |l: Lit| Ok(Bits::Bool(l));
        let v = |x: Vec<Lit>| Ok(Bits::Bv(x));
        match op {
            Not => {
                let l = self.bool_term(&args[0])?;
                b(!l)
            }
            And => {
                let ls = bool_args(self)?;
                b(self.and_all(&ls))
            }
            Or => {
                let ls: Vec<Lit> = bool_args(self)?.into_iter().map(|l| !l).collect();
                b(!self.and_all(&ls))
            }
            Xor => {
                let ls = bool_args(self)?;
                let mut acc = self.ff();
                for l in ls {
                    acc = self.xor(acc, l);
                }
                b(acc)
            }
            Implies => {
                let ls = bool_args(self)?;
                let mut acc = ls[ls.len() - 1];
                for l in ls[..ls.len() - 1].iter().rev() {
                    acc = self.or(!*l, acc);
                }
                b(acc)
            }
            Eq | Distinct => {
                let vals = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let eq = |s: &mut Self, x: &Bits, y: &Bits| match (x, y) {
                    (Bits::Bool(p), Bits::Bool(q)) => s.iff(*p, *q),
                    (Bits::Bv(p), Bits::Bv(q)) => s.bv_eq(p, q),
                    _ => s.ff(),
                };
                let mut parts = Vec::new();
                if *op == Eq {
                    for w in vals.windows(2) {
                        parts.push(eq(self, &w[0], &w[1]));
                    }
                } else {
                    for i in 0..vals.len() {
                        for j in i + 1..vals.len() {
                            let e = eq(self, &vals[i], &vals[j]);
                            parts.push(!e);
                        }
                    }
                }
                b(self.and_all(&parts))
            }
            Ite => {
                let c = self.bool_term(&args[0])?;
                match (self.term(&args[1])?, self.term(&args[2])?) {
                    (Bits::Bool(x), Bits::Bool(y)) => b(self.ite(c, x, y)),
                    (Bits::Bv(x), Bits::Bv(y)) => v(self.bv_ite(c, &x, &y)),
                    _ => unsupported("ill-sorted ite"),
                }
            }
            Concat => {
                let xs = bv_args(self)?;
                let mut out = Vec::new();
                for x in xs.iter().rev() {
                    out.extend_from_slice(x);
                }
                v(out)
            }
            Extract(i, j) => {
                let x = self.bv_term(&args[0])?;
                v(x[*j as usize..=*i as usize].to_vec())
            }
            BvNot => v(self.bv_term(&args[0])?.into_iter().map(|l| !l).collect()),
            BvNeg => {
                let x = self.bv_term(&args[0])?;
                v(self.bv_neg(&x))
            }
            BvAnd | BvOr | BvXor | BvAdd | BvMul => {
                let xs = bv_args(self)?;
                let mut acc = xs[0].clone();
                for x in &xs[1..] {
                    acc = match op {
                        BvAnd => acc.iter().zip(x).map(|(p, q)| self.and(*p, *q)).collect(),
                        BvOr => acc.iter().zip(x).map(|(p, q)| self.or(*p, *q)).collect(),
                        BvXor => acc.iter().zip(x).map(|(p, q)| self.xor(*p, *q)).collect(),
                        BvAdd => self.bv_add(&acc, x),
                        _ => self.bv_mul(&acc, x),
                    };
                }
                v(acc)
            }
            BvNand | BvNor | BvXnor => {
                let xs = bv_args(self)?;
                let out = xs[0]
                    .iter()
                    .zip(&xs[1])
                    .map(|(p, q)| match op {
                        BvNand => !self.and(*p, *q),
                        BvNor => !self.or(*p, *q),
                        _ => !self.xor(*p, *q),
                    })
                    .collect();
                v(out)
            }
            BvSub => {
                let xs = bv_args(self)?;
                v(self.bv_sub(&xs[0], &xs[1]))
            }
            BvUdiv | BvUrem => {
                let xs = bv_args(self)?;
                let (q, r) = self.bv_udivrem(&xs[0], &xs[1]);
                v(if *op == BvUdiv { q } else { r })
            }
            BvSdiv | BvSrem | BvSmod => {
                let xs = bv_args(self)?;
                v(self.signed_division(op, &xs[0], &xs[1]))
            }
            BvShl | BvLshr | BvAshr => {
                let xs = bv_args(self)?;
                v(self.bv_shift(&xs[0], &xs[1], op))
            }
            BvUlt | BvUle | BvUgt | BvUge | BvSlt | BvSle | BvSgt | BvSge => {
                let xs = bv_args(self)?;
                let (x, y) = (&xs[0], &xs[1]);
                b(match op {
                    BvUlt => self.bv_ult(x, y),
                    BvUgt => self.bv_ult(y, x),
                    BvUle => !self.bv_ult(y, x),
                    BvUge => !self.bv_ult(x, y),
                    BvSlt => self.bv_slt(x, y),
                    BvSgt => self.bv_slt(y, x),
                    BvSle => !self.bv_slt(y, x),
                    _ => !self.bv_slt(x, y),
                })
            }
            BvComp => {
                let xs = bv_args(self)?;
                v(vec![self.bv_eq(&xs[0], &xs[1])])
            }
            ZeroExtend(i) => {
                let mut x = self.bv_term(&args[0])?;
                let ff = self.ff();
                x.extend((0..*i).map(|_| ff));
                v(x)
            }
            SignExtend(i) => {
                let mut x = self.bv_term(&args[0])?;
                let top = x[x.len() - 1];
                x.extend((0..*i).map(|_| top));
                v(x)
            }
            RotateLeft(i) | RotateRight(i) => {
                let x = self.bv_term(&args[0])?;
                let w = x.len();
                let k = *i as usize % w;
                let left = if matches!(op, RotateLeft(_)) { k } else { (w - k) % w };
                v((0..w).map(|j| x[(j + w - left) % w]).collect())
            }
            Repeat(i) => {
                let x = self.bv_term(&args[0])?;
                let mut out = Vec::new();
                for _ in 0..*i {
                    out.extend_from_slice(&x);
                }
                v(out)
            }
            Uf(n) => unsupported(format!("declared function `{}`", n)),
            _ => unsupported(format!("operator {} of sort {}", op, sort)),
        }
    }

    fn signed_division(&mut self, op: &Op, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let w = a.len();
        let (sa, sb) = (a[w - 1], b[w - 1]);
        let na = self.bv_neg(a);
        let nb = self.bv_neg(b);
        let abs_a = self.bv_ite(sa, &na, a);
        let abs_b = self.bv_ite(sb, &nb, b);
        let (q, r) = self.bv_udivrem(&abs_a, &abs_b);
        match op {
            Op::BvSdiv => {
                let nq = self.bv_neg(&q);
                let differ = self.xor(sa, sb);
                self.bv_ite(differ, &nq, &q)
            }
            Op::BvSrem => {
                let nr = self.bv_neg(&r);
                self.bv_ite(sa, &nr, &r)
            }
            _ => {
                // smod: sign follows the divisor
                let zero = self.bv_const(w as u32, 0);
                let is_zero = self.bv_eq(&r, &zero);
                let nr = self.bv_neg(&r);
                let nr_plus_b = self.bv_add(&nr, b);
                let r_plus_b = self.bv_add(&r, b);
                let a_pos = self.bv_ite(sb, &r_plus_b, &r);
                let a_neg = self.bv_ite(sb, &nr, &nr_plus_b);
                let chosen = self.bv_ite(sa, &a_neg, &a_pos);
                self.bv_ite(is_zero, &r, &chosen)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::BvConst;
    use crate::value::{apply, Value};

    fn var(n: &str, w: u32) -> Term {
        Term::var(n, Sort::BitVec(w))
    }

    /// Every binary bit-vector operator agrees with the reference evaluator
    /// on all 3-bit inputs.
    #[test]
    fn circuits_match_reference_semantics() {
        let ops = [
            Op::BvAdd,
            Op::BvSub,
            Op::BvMul,
            Op::BvUdiv,
            Op::BvUrem,
            Op::BvSdiv,
            Op::BvSrem,
            Op::BvSmod,
            Op::BvShl,
            Op::BvLshr,
            Op::BvAshr,
            Op::BvNand,
            Op::BvXnor,
            Op::BvComp,
        ];
        for op in &ops {
            for a in 0..8u128 {
                for c in 0..8u128 {
                    let expected = apply(op, &[Value::BitVec(BvConst::new(3, a)), Value::BitVec(BvConst::new(3, c))])
                        .unwrap();
                    let w = if *op == Op::BvComp { 1 } else { 3 };
                    let app = Term::mk(op.clone(), vec![var("a", 3), var("c", 3)]);
                    let q = Query {
                        declarations: vec![
                            ("a".into(), vec![], Sort::BitVec(3)),
                            ("c".into(), vec![], Sort::BitVec(3)),
                            ("r".into(), vec![], Sort::BitVec(w)),
                        ],
                        assertions: vec![
                            Term::eq(var("a", 3), Term::bv(3, a)),
                            Term::eq(var("c", 3), Term::bv(3, c)),
                            Term::eq(var("r", w), app),
                        ],
                        values: vec!["r".into()],
                        ..Default::default()
                    };
                    match BuiltinSolver.check(&q).unwrap() {
                        CheckResult::Sat(m) => {
                            assert_eq!(Value::from_term(&m.values["r"]).unwrap(), expected, "{op} {a} {c}")
                        }
                        other => panic!("{other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn comparisons_and_unsat() {
        // x <u 2 and x >s 2 over 3 bits is unsat: x in {0,1} are not > 2
        let x = var("x", 3);
        let q = Query {
            declarations: vec![("x".into(), vec![], Sort::BitVec(3))],
            assertions: vec![
                Term::mk(Op::BvUlt, vec![x.clone(), Term::bv(3, 2)]),
                Term::mk(Op::BvSgt, vec![x, Term::bv(3, 2)]),
            ],
            ..Default::default()
        };
        assert_eq!(BuiltinSolver.check(&q).unwrap(), CheckResult::Unsat);
    }

    #[test]
    fn integers_are_rejected() {
        let q = Query {
            declarations: vec![("y".into(), vec![], Sort::Int)],
            ..Default::default()
        };
        assert!(matches!(BuiltinSolver.check(&q), Err(SolverError::Unsupported(_))));
    }
}
