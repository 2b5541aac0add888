//! Explicit-state interpreter for finite instances of a transition system.
//!
//! Every variable gets a finite domain (Int variables through user bounds,
//! bit-vectors up to [`MAX_ORACLE_BV_WIDTH`] bits). Transitions whose next
//! values fall outside the domains are dropped, so all answers are about
//! the bounded instance.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{PropertyKind, PropertySpec, TransitionSystem};
use crate::sort::Sort;
use crate::term::{Op, Term};
use crate::value::{apply, enumerate_sort, EvalError, Value};

pub const MAX_ORACLE_BV_WIDTH: u32 = 8;
const DEFAULT_MAX_STATES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("not supported by the explicit-state oracle: {0}")]
    UnsupportedForOracle(String),
    #[error("value out of range: {0}")]
    DomainOverflow(String),
    #[error("no value given for `{0}`")]
    Unassigned(String),
    #[error("invalid bound {lo}:{hi}")]
    InvalidBound { lo: i128, hi: i128 },
    #[error("more than {0} reachable states")]
    TooManyStates(usize),
    #[error("expected a {expected} property")]
    WrongPropertyKind { expected: &'static str },
}

impl From<EvalError> for OracleError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Unsupported(what) => OracleError::UnsupportedForOracle(what),
            EvalError::Overflow => OracleError::DomainOverflow("integer overflow".to_string()),
        }
    }
}

/// Finite domains for the variables of a system.
#[derive(Debug, Clone)]
pub struct DomainBounds {
    /// Interval applied to every Int variable without its own bound.
    pub default_int: Option<(i128, i128)>,
    pub ints: BTreeMap<String, (i128, i128)>,
    /// Exploration stops with [`OracleError::TooManyStates`] beyond this.
    pub max_states: usize,
}

impl Default for DomainBounds {
    fn default() -> Self {
        DomainBounds {
            default_int: None,
            ints: BTreeMap::new(),
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

impl DomainBounds {
    pub fn with_default_int(lo: i128, hi: i128) -> Result<Self, OracleError> {
        if lo > hi {
            return Err(OracleError::InvalidBound { lo, hi });
        }
        Ok(DomainBounds {
            default_int: Some((lo, hi)),
            ..Default::default()
        })
    }

    pub fn set_int(&mut self, name: &str, lo: i128, hi: i128) -> Result<(), OracleError> {
        if lo > hi {
            return Err(OracleError::InvalidBound { lo, hi });
        }
        self.ints.insert(name.to_string(), (lo, hi));
        Ok(())
    }

    pub fn domain(&self, name: &str, sort: &Sort) -> Result<Vec<Value>, OracleError> {
        let range = self.ints.get(name).copied().or(self.default_int);
        if *sort == Sort::Int && range.is_none() {
            return Err(OracleError::UnsupportedForOracle(format!(
                "Int variable `{}` has no bounds",
                name
            )));
        }
        Ok(enumerate_sort(sort, range, MAX_ORACLE_BV_WIDTH)?)
    }
}

/// Values of the current-state variables, in the order of `ts.states`.
pub type State = Vec<Value>;

/// A finite path: `inputs[i]` drives the step from `states[i]` to `states[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePath {
    pub states: Vec<State>,
    pub inputs: Vec<Vec<Value>>,
}

/// An infinite path `states[..loop_start] (states[loop_start..])^ω`.
/// `inputs[i]` drives the step out of `states[i]`; the last one leads back
/// to `states[loop_start]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub states: Vec<State>,
    pub inputs: Vec<Vec<Value>>,
    pub loop_start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantResult {
    Counterexample(FinitePath),
    /// No violation within the depth; `exhausted` means every reachable
    /// state of the bounded instance was visited.
    NoCounterexample { exhausted: bool },
}

/// A term compiled against the variable slots of one system.
#[derive(Debug, Clone)]
enum Expr {
    Const(Value),
    Slot(usize),
    App(Op, Vec<Expr>),
}

/// Slot layout: current states, then inputs, then next states.
pub struct Explorer<'a> {
    ts: &'a TransitionSystem,
    state_domains: Vec<Vec<Value>>,
    input_domains: Vec<Vec<Value>>,
    init: Expr,
    trans: Expr,
    max_states: usize,
}

impl<'a> Explorer<'a> {
    pub fn new(ts: &'a TransitionSystem, bounds: &DomainBounds) -> Result<Self, OracleError> {
        let state_domains = ts
            .states
            .iter()
            .map(|s| bounds.domain(&s.current, &s.sort))
            .collect::<Result<Vec<_>, _>>()?;
        let input_domains = ts
            .inputs
            .iter()
            .map(|(n, s)| bounds.domain(n, s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ex = Explorer {
            ts,
            state_domains,
            input_domains,
            init: Expr::Const(Value::Bool(true)),
            trans: Expr::Const(Value::Bool(true)),
            max_states: bounds.max_states,
        };
        ex.init = ex.compile(&ts.init)?;
        ex.trans = ex.compile(&ts.trans)?;
        Ok(ex)
    }

    pub fn system(&self) -> &TransitionSystem {
        self.ts
    }

    fn n_states(&self) -> usize {
        self.ts.states.len()
    }

    fn slot_of(&self, name: &str) -> Option<usize> {
        let n = self.n_states();
        if let Some(i) = self.ts.states.iter().position(|s| s.current == name) {
            return Some(i);
        }
        if let Some(i) = self.ts.inputs.iter().position(|(m, _)| m == name) {
            return Some(n + i);
        }
        self.ts
            .states
            .iter()
            .position(|s| s.next == name)
            .map(|i| n + self.ts.inputs.len() + i)
    }

    fn slot_name(&self, slot: usize) -> &str {
        let n = self.n_states();
        let m = self.ts.inputs.len();
        if slot < n {
            &self.ts.states[slot].current
        } else if slot < n + m {
            &self.ts.inputs[slot - n].0
        } else {
            &self.ts.states[slot - n - m].next
        }
    }

    fn compile(&self, t: &Term) -> Result<Expr, OracleError> {
        self.compile_in(t, &mut Vec::new())
    }

    fn compile_in(&self, t: &Term, lets: &mut Vec<(String, Expr)>) -> Result<Expr, OracleError> {
        Ok(match t {
            Term::Var(n, _) => {
                if let Some((_, e)) = lets.iter().rev().find(|(m, _)| m == n) {
                    return Ok(e.clone());
                }
                Expr::Slot(
                    self.slot_of(n)
                        .ok_or_else(|| OracleError::UnsupportedForOracle(format!("free symbol `{}`", n)))?,
                )
            }
            Term::Const(c) => Expr::Const(Value::from_constant(c)?),
            Term::App(Op::Uf(n), _, _) => {
                return Err(OracleError::UnsupportedForOracle(format!("uninterpreted function `{}`", n)))
            }
            Term::App(op, args, _) => {
                let args = args.iter().map(|a| self.compile_in(a, lets)).collect::<Result<_, _>>()?;
                Expr::App(op.clone(), args)
            }
            Term::Let(bs, body) => {
                let compiled = bs
                    .iter()
                    .map(|(n, v)| Ok((n.clone(), self.compile_in(v, lets)?)))
                    .collect::<Result<Vec<_>, OracleError>>()?;
                let depth = lets.len();
                lets.extend(compiled);
                let body = self.compile_in(body, lets);
                lets.truncate(depth);
                body?
            }
            Term::Quant(..) => return Err(OracleError::UnsupportedForOracle("quantifiers".to_string())),
            Term::Annot(inner, _) => self.compile_in(inner, lets)?,
        })
    }

    /// Kleene evaluation: `None` when the value depends on unassigned slots.
    /// Integer overflow also yields `Err`.
    fn peval(&self, e: &Expr, env: &[Option<Value>]) -> Result<Option<Value>, EvalError> {
        match e {
            Expr::Const(v) => Ok(Some(v.clone())),
            Expr::Slot(i) => Ok(env[*i].clone()),
            Expr::App(op, args) => match op {
                Op::And | Op::Or => {
                    let absorbing = *op == Op::Or;
                    let mut unknown = false;
                    for a in args {
                        match self.peval(a, env)? {
                            Some(Value::Bool(b)) if b == absorbing => return Ok(Some(Value::Bool(absorbing))),
                            Some(_) => {}
                            None => unknown = true,
                        }
                    }
                    Ok(if unknown { None } else { Some(Value::Bool(!absorbing)) })
                }
                Op::Implies => {
                    // right associative: a => (b => c)
                    let mut acc = self.peval(&args[args.len() - 1], env)?;
                    for a in args[..args.len() - 1].iter().rev() {
                        if acc == Some(Value::Bool(true)) {
                            continue;
                        }
                        acc = match (self.peval(a, env)?, acc) {
                            (Some(Value::Bool(false)), _) => Some(Value::Bool(true)),
                            (Some(Value::Bool(true)), r) => r,
                            _ => None,
                        };
                    }
                    Ok(acc)
                }
                Op::Ite => match self.peval(&args[0], env)? {
                    Some(Value::Bool(true)) => self.peval(&args[1], env),
                    Some(_) => self.peval(&args[2], env),
                    None => {
                        let a = self.peval(&args[1], env)?;
                        let b = self.peval(&args[2], env)?;
                        Ok(if a.is_some() && a == b { a } else { None })
                    }
                },
                Op::Not => Ok(match self.peval(&args[0], env)? {
                    Some(Value::Bool(b)) => Some(Value::Bool(!b)),
                    Some(v) => Some(apply(op, &[v])?),
                    None => None,
                }),
                // Values of one sort are equal exactly when they are
                // structurally equal.
                Op::Eq | Op::Xor if args.len() == 2 => {
                    let Some(a) = self.peval(&args[0], env)? else { return Ok(None) };
                    let Some(b) = self.peval(&args[1], env)? else { return Ok(None) };
                    Ok(Some(Value::Bool((a == b) == (*op == Op::Eq))))
                }
                _ => {
                    let mut vals = Vec::with_capacity(args.len());
                    for a in args {
                        match self.peval(a, env)? {
                            Some(v) => vals.push(v),
                            None => return Ok(None),
                        }
                    }
                    apply(op, &vals).map(Some)
                }
            },
        }
    }

    fn eval_full(&self, e: &Expr, env: &[Option<Value>]) -> Result<Value, OracleError> {
        match self.peval(e, env)? {
            Some(v) => Ok(v),
            None => {
                let missing = (0..env.len())
                    .find(|i| env[*i].is_none() && mentions(e, *i))
                    .map(|i| self.slot_name(i).to_string())
                    .unwrap_or_default();
                Err(OracleError::Unassigned(missing))
            }
        }
    }

    fn env(&self, state: Option<&[Value]>, inputs: Option<&[Value]>, next: Option<&[Value]>) -> Vec<Option<Value>> {
        let n = self.n_states();
        let m = self.ts.inputs.len();
        let mut env = vec![None; 2 * n + m];
        let mut fill = |offset: usize, vals: Option<&[Value]>| {
            if let Some(vals) = vals {
                for (i, v) in vals.iter().enumerate() {
                    env[offset + i] = Some(v.clone());
                }
            }
        };
        fill(0, state);
        fill(n, inputs);
        fill(n + m, next);
        env
    }

    /// Evaluates `t` under the given assignments.
    pub fn eval(
        &self,
        t: &Term,
        state: &[Value],
        inputs: Option<&[Value]>,
        next: Option<&[Value]>,
    ) -> Result<Value, OracleError> {
        let e = self.compile(t)?;
        self.eval_full(&e, &self.env(Some(state), inputs, next))
    }

    /// Extends the partial assignment slot by slot (in `order`), pruning
    /// as soon as `e` evaluates to false.
    fn solve(
        &self,
        e: &Expr,
        env: &mut Vec<Option<Value>>,
        order: &[(usize, &Vec<Value>)],
        out: &mut Vec<Vec<Option<Value>>>,
    ) -> Result<(), OracleError> {
        match self.peval(e, env) {
            Ok(Some(Value::Bool(false))) | Err(EvalError::Overflow) => return Ok(()),
            Ok(Some(Value::Bool(true))) if order.is_empty() => {
                out.push(env.clone());
                return Ok(());
            }
            Ok(_) if order.is_empty() => {
                return Err(OracleError::UnsupportedForOracle("non-Boolean relation".to_string()))
            }
            Ok(_) => {}
            Err(e) => return Err(e.into()),
        }
        let (slot, domain) = order[0];
        for v in domain {
            env[slot] = Some(v.clone());
            self.solve(e, env, &order[1..], out)?;
        }
        env[slot] = None;
        Ok(())
    }

    pub fn initial_states(&self) -> Result<Vec<State>, OracleError> {
        let mut env = self.env(None, None, None);
        let order: Vec<(usize, &Vec<Value>)> = self.state_domains.iter().enumerate().collect();
        let mut out = Vec::new();
        self.solve(&self.init, &mut env, &order, &mut out)?;
        Ok(out
            .into_iter()
            .map(|env| env[..self.n_states()].iter().map(|v| v.clone().unwrap()).collect())
            .collect())
    }

    /// All `(inputs, next state)` pairs allowed by the transition relation.
    pub fn successors(&self, state: &[Value]) -> Result<Vec<(Vec<Value>, State)>, OracleError> {
        let n = self.n_states();
        let m = self.ts.inputs.len();
        let mut env = self.env(Some(state), None, None);
        let mut order: Vec<(usize, &Vec<Value>)> = Vec::new();
        order.extend(self.input_domains.iter().enumerate().map(|(i, d)| (n + i, d)));
        order.extend(self.state_domains.iter().enumerate().map(|(i, d)| (n + m + i, d)));
        let mut out = Vec::new();
        self.solve(&self.trans, &mut env, &order, &mut out)?;
        Ok(out
            .into_iter()
            .map(|env| {
                let inputs = env[n..n + m].iter().map(|v| v.clone().unwrap()).collect();
                let next = env[n + m..].iter().map(|v| v.clone().unwrap()).collect();
                (inputs, next)
            })
            .collect())
    }

    /// Whether `formula` holds in `state`.
    pub fn holds(&self, formula: &Term, state: &[Value]) -> Result<bool, OracleError> {
        match self.eval(formula, state, None, None)? {
            Value::Bool(b) => Ok(b),
            _ => Err(OracleError::UnsupportedForOracle("non-Boolean formula".to_string())),
        }
    }

    /// Whether the step `state --inputs--> next` satisfies the transition relation.
    pub fn step_holds(&self, state: &[Value], inputs: &[Value], next: &[Value]) -> Result<bool, OracleError> {
        Ok(self.eval_full(&self.trans, &self.env(Some(state), Some(inputs), Some(next)))? == Value::Bool(true))
    }

    pub fn is_initial(&self, state: &[Value]) -> Result<bool, OracleError> {
        Ok(self.eval_full(&self.init, &self.env(Some(state), None, None))? == Value::Bool(true))
    }

    /// Explores the reachable states breadth first, up to `max_depth` steps.
    pub fn explore(&self, max_depth: Option<usize>) -> Result<StateGraph, OracleError> {
        let mut g = StateGraph::default();
        let mut queue = VecDeque::new();
        for s in self.initial_states()? {
            if let Some(id) = g.add(s, 0, None) {
                g.initial.push(id);
                queue.push_back(id);
            }
        }
        g.complete = true;
        while let Some(id) = queue.pop_front() {
            if max_depth.is_some_and(|d| g.depth[id] >= d) {
                // Find out whether anything lies beyond the horizon.
                for (_, next) in self.successors(&g.states[id].clone())? {
                    if !g.index.contains_key(&next) {
                        g.complete = false;
                    }
                }
                continue;
            }
            let mut edges = Vec::new();
            for (inputs, next) in self.successors(&g.states[id].clone())? {
                let depth = g.depth[id] + 1;
                let target = match g.index.get(&next) {
                    Some(t) => *t,
                    None => {
                        if g.states.len() >= self.max_states {
                            return Err(OracleError::TooManyStates(self.max_states));
                        }
                        let t = g.add(next, depth, Some((id, inputs.clone()))).unwrap();
                        queue.push_back(t);
                        t
                    }
                };
                if !edges.iter().any(|(t, _)| *t == target) {
                    edges.push((target, inputs));
                }
            }
            g.edges[id] = edges;
        }
        Ok(g)
    }
}

fn mentions(e: &Expr, slot: usize) -> bool {
    match e {
        Expr::Const(_) => false,
        Expr::Slot(i) => *i == slot,
        Expr::App(_, args) => args.iter().any(|a| mentions(a, slot)),
    }
}

/// Reachable part of a bounded instance.
#[derive(Debug, Clone, Default)]
pub struct StateGraph {
    pub states: Vec<State>,
    pub initial: Vec<usize>,
    /// One edge per distinct target, labelled with some enabling inputs.
    pub edges: Vec<Vec<(usize, Vec<Value>)>>,
    /// Breadth-first distance from the initial states.
    pub depth: Vec<usize>,
    parent: Vec<Option<(usize, Vec<Value>)>>,
    index: BTreeMap<State, usize>,
    /// Every reachable state was expanded.
    pub complete: bool,
}

impl StateGraph {
    fn add(&mut self, s: State, depth: usize, parent: Option<(usize, Vec<Value>)>) -> Option<usize> {
        if self.index.contains_key(&s) {
            return None;
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.edges.push(Vec::new());
        self.depth.push(depth);
        self.parent.push(parent);
        Some(id)
    }

    pub fn id(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// A shortest path from an initial state to `id`.
    pub fn path_to(&self, id: usize) -> FinitePath {
        let mut states = vec![self.states[id].clone()];
        let mut inputs = Vec::new();
        let mut cur = id;
        while let Some((p, inp)) = &self.parent[cur] {
            states.push(self.states[*p].clone());
            inputs.push(inp.clone());
            cur = *p;
        }
        states.reverse();
        inputs.reverse();
        FinitePath { states, inputs }
    }

    /// Shortest-path distances from `src` following edges; `None` where
    /// unreachable.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        self.bfs(src).0
    }

    fn bfs(&self, src: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut dist = vec![None; self.states.len()];
        let mut pred = vec![None; self.states.len()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in &self.edges[u] {
                if dist[*v].is_none() {
                    dist[*v] = Some(dist[u].unwrap() + 1);
                    pred[*v] = Some(u);
                    queue.push_back(*v);
                }
            }
        }
        (dist, pred)
    }

    fn edge_inputs(&self, u: usize, v: usize) -> Vec<Value> {
        self.edges[u].iter().find(|(t, _)| *t == v).unwrap().1.clone()
    }

    /// A shortest walk from `from` to `to` with at least one step, as the
    /// list of visited ids (excluding `from`).
    fn walk(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for (s, _) in &self.edges[from] {
            let (dist, pred) = self.bfs(*s);
            if let Some(d) = dist[to] {
                if best.as_ref().is_none_or(|b| d + 1 < b.len()) {
                    let mut path = vec![to];
                    let mut cur = to;
                    while cur != *s {
                        cur = pred[cur].unwrap();
                        path.push(cur);
                    }
                    path.reverse();
                    best = Some(path);
                }
            }
        }
        best
    }

    /// Strongly connected components (Tarjan, iterative); returns the
    /// component id of each node and whether that component has a cycle.
    pub fn components(&self) -> (Vec<usize>, Vec<bool>) {
        let n = self.states.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut cyclic = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (u, ref mut next_edge)) = call.last_mut() {
                if *next_edge < self.edges[u].len() {
                    let v = self.edges[u][*next_edge].0;
                    *next_edge += 1;
                    if index[v] == usize::MAX {
                        index[v] = counter;
                        low[v] = counter;
                        counter += 1;
                        stack.push(v);
                        on_stack[v] = true;
                        call.push((v, 0));
                    } else if on_stack[v] {
                        low[u] = low[u].min(index[v]);
                    }
                } else {
                    call.pop();
                    if let Some(&(p, _)) = call.last() {
                        low[p] = low[p].min(low[u]);
                    }
                    if low[u] == index[u] {
                        let id = cyclic.len();
                        let mut size = 0;
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = id;
                            size += 1;
                            if w == u {
                                break;
                            }
                        }
                        let self_loop = self.edges[u].iter().any(|(t, _)| *t == u);
                        cyclic.push(size > 1 || self_loop);
                    }
                }
            }
        }
        (comp, cyclic)
    }
}

/// Breadth-first search for a reachable state violating an invariant,
/// within `max_depth` steps.
pub fn check_invariant_explicit(
    ts: &TransitionSystem,
    p: &PropertySpec,
    bounds: &DomainBounds,
    max_depth: usize,
) -> Result<InvariantResult, OracleError> {
    if p.kind != PropertyKind::Invariant {
        return Err(OracleError::WrongPropertyKind { expected: "invariant" });
    }
    let ex = Explorer::new(ts, bounds)?;
    let g = ex.explore(Some(max_depth))?;
    for (id, s) in g.states.iter().enumerate() {
        if !ex.holds(&p.formula, s)? {
            return Ok(InvariantResult::Counterexample(g.path_to(id)));
        }
    }
    Ok(InvariantResult::NoCounterexample { exhausted: g.complete })
}

/// Looks for an infinite path visiting a `¬p` state infinitely often.
/// Returns the shortest such lasso (fewest distinct positions).
pub fn check_live_explicit(
    ts: &TransitionSystem,
    p: &PropertySpec,
    bounds: &DomainBounds,
) -> Result<Option<Lasso>, OracleError> {
    if p.kind != PropertyKind::Live {
        return Err(OracleError::WrongPropertyKind { expected: "live" });
    }
    let ex = Explorer::new(ts, bounds)?;
    let g = ex.explore(None)?;
    let bad = g
        .states
        .iter()
        .map(|s| ex.holds(&p.formula, s).map(|b| !b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(shortest_lasso(&g, &bad))
}

/// The shortest lasso through a node with `accepting[node]`: minimizes the
/// stem length plus the length of a closed walk from the loop entry through
/// an accepting node.
pub fn shortest_lasso(g: &StateGraph, accepting: &[bool]) -> Option<Lasso> {
    let (comp, cyclic) = g.components();
    let n = g.states.len();
    // cycle[l][q]: shortest closed walk from l through q (l, q in one cyclic component).
    let mut best: Option<(usize, usize, usize)> = None;
    let mut dist_cache: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
    let mut shortest_cycle: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    for q in 0..n {
        if !accepting[q] || !cyclic[comp[q]] {
            continue;
        }
        let from_q = dist_cache.entry(q).or_insert_with(|| g.distances_from(q)).clone();
        for l in 0..n {
            if comp[l] != comp[q] {
                continue;
            }
            let walk = if l == q {
                *shortest_cycle.entry(q).or_insert_with(|| {
                    g.edges[q]
                        .iter()
                        .filter_map(|(s, _)| if *s == q { Some(0) } else { from_q_to(g, *s, q) })
                        .min()
                        .map(|d| d + 1)
                })
            } else {
                let from_l = dist_cache.entry(l).or_insert_with(|| g.distances_from(l)).clone();
                match (from_l[q], from_q[l]) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                }
            };
            if let Some(w) = walk {
                let total = g.depth[l] + w;
                if best.is_none_or(|(t, _, _)| total < t) {
                    best = Some((total, l, q));
                }
            }
        }
    }
    let (_, l, q) = best?;
    let stem = g.path_to(l);
    let mut ids: Vec<usize> = Vec::new();
    if l == q {
        ids.extend(g.walk(l, l)?);
    } else {
        ids.extend(g.walk(l, q)?);
        ids.extend(g.walk(q, l)?);
    }
    // ids ends with l; turn it into the loop body starting at l.
    let mut loop_ids = vec![l];
    loop_ids.extend(&ids[..ids.len() - 1]);
    let loop_start = stem.states.len() - 1;
    let mut states = stem.states;
    let mut inputs = stem.inputs;
    for (i, id) in loop_ids.iter().enumerate() {
        if i > 0 {
            states.push(g.states[*id].clone());
        }
        let to = if i + 1 < loop_ids.len() { loop_ids[i + 1] } else { l };
        inputs.push(g.edge_inputs(*id, to));
    }
    Some(Lasso {
        states,
        inputs,
        loop_start,
    })
}

fn from_q_to(g: &StateGraph, s: usize, q: usize) -> Option<usize> {
    g.distances_from(s)[q]
}

/// Checks that `path` starts in an initial state and follows the transition
/// relation.
pub fn validate_path(ex: &Explorer<'_>, path: &FinitePath) -> Result<bool, OracleError> {
    if path.states.is_empty() || path.inputs.len() + 1 != path.states.len() {
        return Ok(false);
    }
    if !ex.is_initial(&path.states[0])? {
        return Ok(false);
    }
    for i in 0..path.inputs.len() {
        if !ex.step_holds(&path.states[i], &path.inputs[i], &path.states[i + 1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `lasso` is a real infinite path with a `¬p` state in its loop.
pub fn validate_lasso(ex: &Explorer<'_>, lasso: &Lasso, p: &Term) -> Result<bool, OracleError> {
    let k = lasso.states.len();
    if k == 0 || lasso.inputs.len() != k || lasso.loop_start >= k {
        return Ok(false);
    }
    if !ex.is_initial(&lasso.states[0])? {
        return Ok(false);
    }
    for i in 0..k {
        let next = if i + 1 < k {
            &lasso.states[i + 1]
        } else {
            &lasso.states[lasso.loop_start]
        };
        if !ex.step_holds(&lasso.states[i], &lasso.inputs[i], next)? {
            return Ok(false);
        }
    }
    for s in &lasso.states[lasso.loop_start..] {
        if !ex.holds(p, s)? {
            return Ok(true);
        }
    }
    Ok(false)
}
