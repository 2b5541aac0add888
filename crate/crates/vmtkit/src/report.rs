//! Text rendering of verification results.
//!
//! A counterexample is a sequence of blocks
//!
//! ```text
//! step 0:
//!   x = 1
//!   b = false
//! step 1:
//!   x = 1
//! ```
//!
//! listing the state variables and then the inputs driving the step out of
//! that state. Lassos end with a `loop-start: <l>` line: the step out of the
//! last listed state leads back to step `l`.

use std::fmt::{Display, Write};

use vmtkit_core::bmc::{LassoTrace, Trace};
use vmtkit_core::model::TransitionSystem;
use vmtkit_core::oracle::{FinitePath, Lasso};
use vmtkit_core::sexpr::quote_symbol;

fn write_steps<V: Display>(out: &mut String, sys: &TransitionSystem, states: &[Vec<V>], inputs: &[Vec<V>]) {
    for (i, row) in states.iter().enumerate() {
        let _ = writeln!(out, "step {}:", i);
        for (s, v) in sys.states.iter().zip(row) {
            let _ = writeln!(out, "  {} = {}", quote_symbol(&s.current), v);
        }
        if let Some(ins) = inputs.get(i) {
            for ((n, _), v) in sys.inputs.iter().zip(ins) {
                let _ = writeln!(out, "  {} = {}", quote_symbol(n), v);
            }
        }
    }
}

pub fn trace(sys: &TransitionSystem, t: &Trace) -> String {
    let mut out = String::new();
    write_steps(&mut out, sys, &t.states, &t.inputs);
    out
}

pub fn lasso_trace(sys: &TransitionSystem, t: &LassoTrace) -> String {
    let mut out = String::new();
    write_steps(&mut out, sys, &t.states, &t.inputs);
    let _ = writeln!(out, "loop-start: {}", t.loop_start);
    out
}

pub fn path(sys: &TransitionSystem, p: &FinitePath) -> String {
    let mut out = String::new();
    write_steps(&mut out, sys, &p.states, &p.inputs);
    out
}

pub fn lasso(sys: &TransitionSystem, l: &Lasso) -> String {
    let mut out = String::new();
    write_steps(&mut out, sys, &l.states, &l.inputs);
    let _ = writeln!(out, "loop-start: {}", l.loop_start);
    out
}

/// A parsed counterexample block: per step, `(name, value)` pairs in order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedTrace {
    pub steps: Vec<Vec<(String, String)>>,
    pub loop_start: Option<usize>,
}

/// Reads back the `step`/`loop-start` lines of a report, ignoring any other
/// `key: value` header lines.
pub fn parse_trace(text: &str) -> ParsedTrace {
    let mut out = ParsedTrace::default();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("step ") {
            if rest.trim_end().ends_with(':') {
                out.steps.push(Vec::new());
            }
        } else if let Some(l) = line.strip_prefix("loop-start: ") {
            out.loop_start = l.trim().parse().ok();
        } else if let (Some(step), Some((n, v))) = (out.steps.last_mut(), line.strip_prefix("  ").and_then(|l| l.split_once(" = "))) {
            step.push((n.to_string(), v.to_string()));
        }
    }
    out
}
