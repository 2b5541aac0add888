//! LTL formulas over numbered atoms, an explicit-state satisfiability check
//! against a [`BoolSystem`], and direct evaluation on lassos.
//!
//! The explicit check builds the closure-set tableau of the formula with the
//! system's reachable states and looks for a fair strongly connected
//! component; it shares nothing with the library's symbolic encoding.

use std::collections::{BTreeSet, HashMap};

use super::bool_sys::{BoolSystem, B};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum F {
    Atom(usize),
    Not(Box<F>),
    X(Box<F>),
    Fin(Box<F>),
    Glob(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Imp(Box<F>, Box<F>),
    U(Box<F>, Box<F>),
    R(Box<F>, Box<F>),
}

impl F {
    fn is_atom(&self) -> bool {
        matches!(self, F::Atom(_))
    }

    /// Concrete syntax accepted by the LTL parser, with SMT-LIB atoms.
    pub fn render(&self, atoms: &[String]) -> String {
        let wrap = |f: &F| if f.is_atom() { f.render(atoms) } else { format!("({})", f.render(atoms)) };
        match self {
            F::Atom(i) => atoms[*i].clone(),
            F::Not(a) => format!("!{}", wrap(a)),
            F::X(a) => format!("X {}", wrap(a)),
            F::Fin(a) => format!("F {}", wrap(a)),
            F::Glob(a) => format!("G {}", wrap(a)),
            F::And(a, b) => format!("{} & {}", wrap(a), wrap(b)),
            F::Or(a, b) => format!("{} | {}", wrap(a), wrap(b)),
            F::Imp(a, b) => format!("{} -> {}", wrap(a), wrap(b)),
            F::U(a, b) => format!("{} U {}", wrap(a), wrap(b)),
            F::R(a, b) => format!("{} R {}", wrap(a), wrap(b)),
        }
    }
}

/// All formulas with exactly `ops` operators over `atoms` atoms.
pub fn formulas_with(ops: usize, atoms: usize) -> Vec<F> {
    let mut by_size: Vec<Vec<F>> = vec![(0..atoms).map(F::Atom).collect()];
    for n in 1..=ops {
        let mut out = Vec::new();
        for a in &by_size[n - 1] {
            let b = || Box::new(a.clone());
            out.extend([F::Not(b()), F::X(b()), F::Fin(b()), F::Glob(b())]);
        }
        for i in 0..n {
            for a in &by_size[i] {
                for c in &by_size[n - 1 - i] {
                    let (x, y) = (|| Box::new(a.clone()), || Box::new(c.clone()));
                    out.extend([F::And(x(), y()), F::Or(x(), y()), F::Imp(x(), y()), F::U(x(), y()), F::R(x(), y())]);
                }
            }
        }
        by_size.push(out);
    }
    by_size.swap_remove(ops)
}

/// Negation normal form over `U`, `R`, `X`, `&`, `|` and literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum N {
    T,
    Fls,
    Lit(usize, bool),
    And(Box<N>, Box<N>),
    Or(Box<N>, Box<N>),
    X(Box<N>),
    U(Box<N>, Box<N>),
    R(Box<N>, Box<N>),
}

pub fn nnf(f: &F, neg: bool) -> N {
    let b = |f: &F, neg: bool| Box::new(nnf(f, neg));
    match (f, neg) {
        (F::Atom(i), _) => N::Lit(*i, !neg),
        (F::Not(a), _) => nnf(a, !neg),
        (F::X(a), _) => N::X(b(a, neg)),
        (F::Fin(a), false) | (F::Glob(a), true) => N::U(Box::new(N::T), b(a, neg)),
        (F::Glob(a), false) | (F::Fin(a), true) => N::R(Box::new(N::Fls), b(a, neg)),
        (F::And(x, y), false) => N::And(b(x, false), b(y, false)),
        (F::And(x, y), true) => N::Or(b(x, true), b(y, true)),
        (F::Or(x, y), false) => N::Or(b(x, false), b(y, false)),
        (F::Or(x, y), true) => N::And(b(x, true), b(y, true)),
        (F::Imp(x, y), false) => N::Or(b(x, true), b(y, false)),
        (F::Imp(x, y), true) => N::And(b(x, false), b(y, true)),
        (F::U(x, y), false) => N::U(b(x, false), b(y, false)),
        (F::U(x, y), true) => N::R(b(x, true), b(y, true)),
        (F::R(x, y), false) => N::R(b(x, false), b(y, false)),
        (F::R(x, y), true) => N::U(b(x, true), b(y, true)),
    }
}

/// Formulas with at most `max_ops` operators, one per NNF class, smallest
/// first.
pub fn enumerate_distinct(max_ops: usize, atoms: usize) -> Vec<F> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 0..=max_ops {
        for f in formulas_with(n, atoms) {
            if seen.insert(nnf(&f, false)) {
                out.push(f);
            }
        }
    }
    out
}

struct Closure {
    /// Formulas `g` whose `X g` is tracked by a tableau bit.
    elementary: Vec<N>,
    untils: Vec<N>,
}

impl Closure {
    fn new(psi: &N) -> Closure {
        let mut c = Closure { elementary: Vec::new(), untils: Vec::new() };
        c.walk(psi);
        c
    }

    fn add(&mut self, g: &N) {
        if !self.elementary.contains(g) {
            self.elementary.push(g.clone());
        }
    }

    fn walk(&mut self, f: &N) {
        match f {
            N::T | N::Fls | N::Lit(..) => {}
            N::And(a, b) | N::Or(a, b) => {
                self.walk(a);
                self.walk(b);
            }
            N::X(a) => {
                self.add(a);
                self.walk(a);
            }
            N::U(a, b) | N::R(a, b) => {
                self.add(f);
                if matches!(f, N::U(..)) && !self.untils.contains(f) {
                    self.untils.push(f.clone());
                }
                self.walk(a);
                self.walk(b);
            }
        }
    }

    fn bit(&self, g: &N) -> usize {
        self.elementary.iter().position(|e| e == g).unwrap()
    }

    /// Truth of `f` at a node labelled by atom values and tableau bits.
    fn sat(&self, f: &N, atoms: &[bool], bits: u32) -> bool {
        let next = |g: &N| bits >> self.bit(g) & 1 == 1;
        match f {
            N::T => true,
            N::Fls => false,
            N::Lit(i, pos) => atoms[*i] == *pos,
            N::And(a, b) => self.sat(a, atoms, bits) && self.sat(b, atoms, bits),
            N::Or(a, b) => self.sat(a, atoms, bits) || self.sat(b, atoms, bits),
            N::X(a) => next(a),
            N::U(a, b) => self.sat(b, atoms, bits) || (self.sat(a, atoms, bits) && next(f)),
            N::R(a, b) => self.sat(b, atoms, bits) && (self.sat(a, atoms, bits) || next(f)),
        }
    }
}

/// Whether some infinite path of `sys` satisfies `f`, with atom `i` read
/// as the state predicate `atoms[i]`.
pub fn exists_path(sys: &BoolSystem, atoms: &[B], f: &F) -> bool {
    let psi = nnf(f, false);
    let cl = Closure::new(&psi);
    let e = cl.elementary.len();
    let nbits = 1u32 << e;
    let nstates = 1u32 << sys.n;
    let labels: Vec<Vec<bool>> =
        (0..nstates).map(|s| atoms.iter().map(|a| a.eval(&sys.state_bits(s))).collect()).collect();
    let node = |s: u32, bits: u32| (s * nbits + bits) as usize;
    // What a node promises to its predecessor: the values of the
    // elementary formulas there.
    let promise = |s: u32, bits: u32| -> u32 {
        cl.elementary
            .iter()
            .enumerate()
            .fold(0, |acc, (i, g)| acc | (cl.sat(g, &labels[s as usize], bits) as u32) << i)
    };
    let mut by_promise: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for s in 0..nstates {
        for bits in 0..nbits {
            by_promise.entry((s, promise(s, bits))).or_default().push(bits);
        }
    }
    let succ_states: Vec<Vec<u32>> = (0..nstates).map(|s| sys.successors(s)).collect();
    let successors = |s: u32, bits: u32| -> Vec<usize> {
        let mut out = Vec::new();
        for &t in &succ_states[s as usize] {
            if let Some(list) = by_promise.get(&(t, bits)) {
                out.extend(list.iter().map(|&b| node(t, b)));
            }
        }
        out
    };

    let total = (nstates * nbits) as usize;
    let mut reach = vec![false; total];
    let mut stack: Vec<usize> = Vec::new();
    for s in sys.initial() {
        for bits in 0..nbits {
            if cl.sat(&psi, &labels[s as usize], bits) {
                stack.push(node(s, bits));
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut reach[v], true) {
            continue;
        }
        let (s, bits) = (v as u32 / nbits, v as u32 % nbits);
        adj[v] = successors(s, bits);
        stack.extend(adj[v].iter().copied().filter(|w| !reach[*w]));
    }

    let comp = scc(&adj, &reach);
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..total {
        if reach[v] {
            groups.entry(comp[v]).or_default().push(v);
        }
    }
    groups.values().any(|members| {
        let cyclic = members.len() > 1 || adj[members[0]].contains(&members[0]);
        cyclic
            && cl.untils.iter().all(|u| {
                let N::U(_, b) = u else { unreachable!() };
                members.iter().any(|&v| {
                    let (s, bits) = (v as u32 / nbits, v as u32 % nbits);
                    let l = &labels[s as usize];
                    !cl.sat(u, l, bits) || cl.sat(b, l, bits)
                })
            })
    })
}

/// Strongly connected components (iterative Tarjan) of the marked nodes.
fn scc(adj: &[Vec<usize>], live: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if !live[root] || index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Truth of `f` at position 0 of the lasso whose position `i` satisfies
/// atom `j` iff `labels[i][j]`, looping back to `loop_start`.
pub fn eval_lasso(f: &F, labels: &[Vec<bool>], loop_start: usize) -> bool {
    values(f, labels, loop_start)[0]
}

fn values(f: &F, labels: &[Vec<bool>], l: usize) -> Vec<bool> {
    let k = labels.len();
    let succ = |i: usize| if i + 1 < k { i + 1 } else { l };
    let fix = |start: bool, step: &dyn Fn(usize, &[bool]) -> bool| {
        let mut r = vec![start; k];
        for _ in 0..=2 * k {
            r = (0..k).map(|i| step(i, &r)).collect();
        }
        r
    };
    match f {
        F::Atom(j) => labels.iter().map(|l| l[*j]).collect(),
        F::Not(a) => values(a, labels, l).into_iter().map(|v| !v).collect(),
        F::X(a) => {
            let a = values(a, labels, l);
            (0..k).map(|i| a[succ(i)]).collect()
        }
        F::Fin(a) => {
            let a = values(a, labels, l);
            fix(false, &|i, r| a[i] || r[succ(i)])
        }
        F::Glob(a) => {
            let a = values(a, labels, l);
            fix(true, &|i, r| a[i] && r[succ(i)])
        }
        F::And(x, y) | F::Or(x, y) | F::Imp(x, y) => {
            let (x, y) = (values(x, labels, l), values(y, labels, l));
            (0..k)
                .map(|i| match f {
                    F::And(..) => x[i] && y[i],
                    F::Or(..) => x[i] || y[i],
                    _ => !x[i] || y[i],
                })
                .collect()
        }
        F::U(x, y) => {
            let (x, y) = (values(x, labels, l), values(y, labels, l));
            fix(false, &|i, r| y[i] || (x[i] && r[succ(i)]))
        }
        F::R(x, y) => {
            let (x, y) = (values(x, labels, l), values(y, labels, l));
            fix(true, &|i, r| y[i] && (x[i] || r[succ(i)]))
        }
    }
}
