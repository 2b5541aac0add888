//! Random Boolean transition systems with their own brute-force semantics,
//! independent of the library's evaluator.

use rand::Rng;

#[derive(Debug, Clone)]
pub enum B {
    Var(usize),
    Const(bool),
    Not(Box<B>),
    And(Box<B>, Box<B>),
    Or(Box<B>, Box<B>),
    Xor(Box<B>, Box<B>),
    Implies(Box<B>, Box<B>),
    Ite(Box<B>, Box<B>, Box<B>),
}

impl B {
    pub fn eval(&self, env: &[bool]) -> bool {
        match self {
            B::Var(i) => env[*i],
            B::Const(b) => *b,
            B::Not(a) => !a.eval(env),
            B::And(a, b) => a.eval(env) && b.eval(env),
            B::Or(a, b) => a.eval(env) || b.eval(env),
            B::Xor(a, b) => a.eval(env) != b.eval(env),
            B::Implies(a, b) => !a.eval(env) || b.eval(env),
            B::Ite(c, a, b) => {
                if c.eval(env) {
                    a.eval(env)
                } else {
                    b.eval(env)
                }
            }
        }
    }

    pub fn smt(&self, names: &[String]) -> String {
        match self {
            B::Var(i) => names[*i].clone(),
            B::Const(b) => b.to_string(),
            B::Not(a) => format!("(not {})", a.smt(names)),
            B::And(a, b) => format!("(and {} {})", a.smt(names), b.smt(names)),
            B::Or(a, b) => format!("(or {} {})", a.smt(names), b.smt(names)),
            B::Xor(a, b) => format!("(xor {} {})", a.smt(names), b.smt(names)),
            B::Implies(a, b) => format!("(=> {} {})", a.smt(names), b.smt(names)),
            B::Ite(c, a, b) => format!("(ite {} {} {})", c.smt(names), a.smt(names), b.smt(names)),
        }
    }

    /// A random formula over variables `0..vars`.
    pub fn random(rng: &mut impl Rng, vars: usize, depth: u32) -> B {
        if depth == 0 || rng.gen_ratio(1, 4) {
            return if vars == 0 || rng.gen_ratio(1, 10) { B::Const(rng.gen()) } else { B::Var(rng.gen_range(0..vars)) };
        }
        let op = rng.gen_range(0..6);
        let mut sub = || Box::new(B::random(rng, vars, depth - 1));
        match op {
            0 => B::Not(sub()),
            1 => B::And(sub(), sub()),
            2 => B::Or(sub(), sub()),
            3 => B::Xor(sub(), sub()),
            4 => B::Implies(sub(), sub()),
            _ => B::Ite(sub(), sub(), sub()),
        }
    }
}

/// States `s0..`, inputs `i0..`, next-state copies `s0.next..`. Formula
/// variables index the concatenation `states ++ inputs ++ nexts`.
#[derive(Debug, Clone)]
pub struct BoolSystem {
    pub n: usize,
    pub m: usize,
    pub init: B,
    pub next: Vec<B>,
    pub constraint: Option<B>,
    pub invar: B,
    pub live: B,
}

impl BoolSystem {
    pub fn random(rng: &mut impl Rng, n: usize, m: usize) -> BoolSystem {
        let init = if rng.gen_bool(0.5) {
            B::random(rng, n, 2)
        } else {
            // A single initial state.
            (0..n).fold(B::Const(true), |acc, i| {
                let lit = if rng.gen() { B::Var(i) } else { B::Not(Box::new(B::Var(i))) };
                B::And(Box::new(acc), Box::new(lit))
            })
        };
        let next = (0..n).map(|_| B::random(rng, n + m, 3)).collect();
        let constraint = rng.gen_bool(0.3).then(|| B::random(rng, 2 * n + m, 2));
        BoolSystem { n, m, init, next, constraint, invar: B::random(rng, n, 3), live: B::random(rng, n, 2) }
    }

    pub fn state_names(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("s{}", i)).collect()
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = self.state_names();
        v.extend((0..self.m).map(|i| format!("i{}", i)));
        v.extend((0..self.n).map(|i| format!("s{}.next", i)));
        v
    }

    /// VMT-LIB text with invariant 1 and live property 2.
    pub fn vmt(&self) -> String {
        let names = self.names();
        let mut out = String::new();
        for i in 0..self.n {
            out += &format!("(declare-fun s{i} () Bool)\n(declare-fun s{i}.next () Bool)\n");
            out += &format!("(define-fun sv.s{i} () Bool (! s{i} :next s{i}.next))\n");
        }
        for i in 0..self.m {
            out += &format!("(declare-fun i{i} () Bool)\n");
        }
        out += &format!("(define-fun init () Bool (! {} :init))\n", self.init.smt(&names));
        let mut conj: Vec<String> =
            self.next.iter().enumerate().map(|(i, e)| format!("(= s{}.next {})", i, e.smt(&names))).collect();
        if let Some(c) = &self.constraint {
            conj.push(c.smt(&names));
        }
        let trans = if conj.len() == 1 { conj.remove(0) } else { format!("(and {})", conj.join(" ")) };
        out += &format!("(define-fun trans () Bool (! {} :trans))\n", trans);
        out += &format!("(define-fun p1 () Bool (! {} :invar-property 1))\n", self.invar.smt(&names));
        out += &format!("(define-fun p2 () Bool (! {} :live-property 2))\n", self.live.smt(&names));
        out
    }

    fn bits(&self, s: u32, width: usize) -> impl Iterator<Item = bool> {
        (0..width).map(move |i| s >> i & 1 == 1)
    }

    pub fn state_bits(&self, s: u32) -> Vec<bool> {
        self.bits(s, self.n).collect()
    }

    pub fn initial(&self) -> Vec<u32> {
        (0..1u32 << self.n).filter(|&s| self.init.eval(&self.state_bits(s))).collect()
    }

    pub fn successors(&self, s: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for inp in 0..1u32 << self.m {
            let mut env: Vec<bool> = self.bits(s, self.n).chain(self.bits(inp, self.m)).collect();
            let next: Vec<bool> = self.next.iter().map(|e| e.eval(&env)).collect();
            env.extend(&next);
            if self.constraint.as_ref().is_none_or(|c| c.eval(&env)) {
                let t = next.iter().enumerate().fold(0u32, |acc, (i, b)| acc | (*b as u32) << i);
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Length of the shortest path to a state violating `invar`.
    pub fn shortest_violation(&self) -> Option<usize> {
        let mut depth = vec![usize::MAX; 1 << self.n];
        let mut frontier = self.initial();
        for &s in &frontier {
            depth[s as usize] = 0;
        }
        let mut d = 0;
        while !frontier.is_empty() {
            if frontier.iter().any(|&s| !self.invar.eval(&self.state_bits(s))) {
                return Some(d);
            }
            d += 1;
            let mut next = Vec::new();
            for s in frontier {
                for t in self.successors(s) {
                    if depth[t as usize] == usize::MAX {
                        depth[t as usize] = d;
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        None
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; 1 << self.n];
        let mut stack = self.initial();
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut seen[s as usize], true) {
                stack.extend(self.successors(s));
            }
        }
        seen
    }

    /// Whether some reachable state where `pred` fails lies on a cycle.
    pub fn has_bad_cycle(&self, pred: &B) -> bool {
        let reach = self.reachable();
        (0..1u32 << self.n).any(|q| {
            if !reach[q as usize] || pred.eval(&self.state_bits(q)) {
                return false;
            }
            let mut seen = vec![false; 1 << self.n];
            let mut stack = self.successors(q);
            while let Some(s) = stack.pop() {
                if s == q {
                    return true;
                }
                if !std::mem::replace(&mut seen[s as usize], true) {
                    stack.extend(self.successors(s));
                }
            }
            false
        })
    }
}
