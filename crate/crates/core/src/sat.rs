//! A small CDCL SAT solver: two watched literals, first-UIP learning,
//! activity-based branching, phase saving and Luby restarts.

use alloc::vec;
use alloc::vec::Vec;

/// A literal: variable index times two, plus one when negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, negated: bool) -> Lit {
        Lit(var * 2 + negated as u32)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[derive(Debug, Default)]
pub struct SatSolver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    units: Vec<Lit>,
    inconsistent: bool,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    heap: VarHeap,
    seen: Vec<bool>,
}

impl SatSolver {
    pub fn new() -> Self {
        SatSolver {
            var_inc: 1.0,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assign.len() as u32
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.assign.len() as u32;
        self.assign.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.insert(v, &self.activity);
        v
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assign[l.var() as usize];
        if l.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Adds a clause; must be called before [`SatSolver::solve`].
    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        match c.len() {
            0 => self.inconsistent = true,
            1 => self.units.push(c[0]),
            _ => {
                let id = self.clauses.len();
                self.watches[c[0].index()].push(id);
                self.watches[c[1].index()].push(id);
                self.clauses.push(c);
            }
        }
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        self.assign[v] = if l.is_negated() { FALSE } else { TRUE };
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let ws = core::mem::take(&mut self.watches[false_lit.index()]);
            let mut keep = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                let clause = &mut self.clauses[cid];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.value(first) == TRUE {
                    keep.push(cid);
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cid].len() {
                    let l = self.clauses[cid][k];
                    if self.value(l) != FALSE {
                        self.clauses[cid].swap(1, k);
                        self.watches[l.index()].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(cid);
                if self.value(first) == FALSE {
                    conflict = Some(cid);
                    keep.extend_from_slice(&ws[i..]);
                    break;
                }
                self.enqueue(first, Some(cid));
            }
            self.watches[false_lit.index()] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// First-UIP conflict analysis: the learnt clause (asserting literal
    /// first) and the level to backtrack to.
    fn analyze(&mut self, mut conflict: usize) -> (Vec<Lit>, u32) {
        let current = self.trail_lim.len() as u32;
        let mut learnt = vec![Lit(0)];
        let mut pending = 0;
        let mut index = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            let clause = self.clauses[conflict].clone();
            for &q in &clause {
                if Some(q) == p {
                    continue;
                }
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(q.var());
                    if self.level[v] == current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            conflict = self.reason[lit.var() as usize].expect("propagated literal without reason");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var() as usize];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: u32) {
        if self.trail_lim.len() as u32 <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.phase[v as usize] = !self.trail[i].is_negated();
            self.assign[v as usize] = UNDEF;
            self.reason[v as usize] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v as usize] == UNDEF {
                return Some(Lit::new(v, !self.phase[v as usize]));
            }
        }
        None
    }

    /// Decides satisfiability of the clauses added so far.
    pub fn solve(&mut self) -> bool {
        if self.inconsistent {
            return false;
        }
        for l in core::mem::take(&mut self.units) {
            match self.value(l) {
                TRUE => {}
                FALSE => {
                    self.inconsistent = true;
                    return false;
                }
                _ => self.enqueue(l, None),
            }
        }
        let mut restart = 0u32;
        loop {
            let budget = 100 * luby(restart);
            restart += 1;
            match self.search(budget) {
                Some(result) => return result,
                None => self.backtrack(0),
            }
        }
    }

    fn search(&mut self, budget: u64) -> Option<bool> {
        let mut conflicts = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                if self.trail_lim.is_empty() {
                    self.inconsistent = true;
                    return Some(false);
                }
                conflicts += 1;
                let (learnt, back) = self.analyze(conflict);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let id = self.clauses.len();
                    self.watches[learnt[0].index()].push(id);
                    self.watches[learnt[1].index()].push(id);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.enqueue(first, Some(id));
                }
                self.var_inc /= 0.95;
            } else {
                if conflicts >= budget {
                    return None;
                }
                match self.pick_branch() {
                    None => return Some(true),
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, None);
                    }
                }
            }
        }
    }

    /// Value of a variable in the model found by the last successful solve.
    pub fn model_value(&self, v: u32) -> bool {
        self.assign[v as usize] == TRUE
    }
}

fn luby(i: u32) -> u64 {
    // 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Max-heap of variables keyed by activity.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.pos.len() <= v as usize {
            self.pos.resize(v as usize + 1, None);
        }
        if self.pos[v as usize].is_some() {
            return;
        }
        self.heap.push(v);
        self.pos[v as usize] = Some(self.heap.len() - 1);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(Some(i)) = self.pos.get(v as usize) {
            self.up(*i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.pos[self.heap[0] as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[i] as usize] <= act[self.heap[parent] as usize] {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && act[self.heap[l] as usize] > act[self.heap[best] as usize] {
                best = l;
            }
            if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[best] as usize] {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a] as usize] = Some(a);
        self.pos[self.heap[b] as usize] = Some(b);
    }
}
