//! Constrained Horn clauses over a single reachability predicate.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ConvertError;
use crate::model::{fresh_name, PropertyKind, VmtDocument};
use crate::script::CommandKind;
use crate::sexpr::quote_symbol;
use crate::sort::Sort;
use crate::Term;

/// Emits the initiation, consecution and safety clauses for invariant `idx`.
/// The clause set is satisfiable exactly when the invariant holds.
pub fn vmt_to_horn(doc: &VmtDocument, idx: u64) -> Result<String, ConvertError> {
    let prop = doc.property(idx).ok_or(ConvertError::NoSuchProperty(idx))?;
    if prop.kind == PropertyKind::Live {
        return Err(ConvertError::LivePropertyUnsupported(idx));
    }
    let sys = &doc.system;
    if sys.init.has_quantifier() || sys.trans.has_quantifier() || prop.formula.has_quantifier() {
        return Err(ConvertError::QuantifiedSystem);
    }

    let mut taken = doc.declared_names();
    let inv = quote_symbol(&fresh_name("Inv", &mut taken));
    let current: Vec<(String, Sort)> = sys.states.iter().map(|s| (s.current.clone(), s.sort.clone())).collect();
    let next: Vec<(String, Sort)> = sys.states.iter().map(|s| (s.next.clone(), s.sort.clone())).collect();
    let apply = |vars: &[(String, Sort)]| {
        if vars.is_empty() {
            inv.clone()
        } else {
            let args: Vec<String> = vars.iter().map(|(n, _)| quote_symbol(n)).collect();
            format!("({} {})", inv, args.join(" "))
        }
    };

    let mut out = String::from("(set-logic HORN)\n");
    for s in &doc.sorts {
        out.push_str(&format!("{}\n", s.to_command()));
    }
    for f in &doc.functions {
        out.push_str(&format!("{}\n", CommandKind::DeclareFun(f.name.clone(), f.args.clone(), f.result.clone())));
    }
    let arg_sorts: Vec<String> = current.iter().map(|(_, s)| format!("{}", s)).collect();
    out.push_str(&format!("(declare-fun {} ({}) Bool)\n", inv, arg_sorts.join(" ")));

    let init = format!("(=> {} {})", term_text(&sys.init), apply(&current));
    out.push_str(&clause(&current, &init));

    let mut step_vars = current.clone();
    step_vars.extend(next.iter().cloned());
    step_vars.extend(sys.inputs.iter().cloned());
    let step = format!("(=> (and {} {}) {})", apply(&current), term_text(&sys.trans), apply(&next));
    out.push_str(&clause(&step_vars, &step));

    let safety = format!("(=> (and {} (not {})) false)", apply(&current), term_text(&prop.formula));
    out.push_str(&clause(&current, &safety));
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn term_text(t: &Term) -> String {
    format!("{}", t.strip_annotations())
}

fn clause(vars: &[(String, Sort)], body: &str) -> String {
    if vars.is_empty() {
        return format!("(assert {})\n", body);
    }
    let binders: Vec<String> = vars.iter().map(|(n, s)| format!("({} {})", quote_symbol(n), s)).collect();
    format!("(assert (forall ({}) {}))\n", binders.join(" "), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_vmt;

    const EXAMPLE: &str = "(declare-const x Int)(declare-const x.next Int)
(define-fun sv.x () Int (! x :next x.next))
(declare-const b Bool)
(define-fun init () Bool (! (= x 1) :init))
(define-fun trans () Bool (! (= x.next (ite b (+ x 1) x)) :trans))
(define-fun p1 () Bool (! (> x 0) :invar-property 1))
(define-fun p2 () Bool (! (> x 10) :live-property 2))";

    #[test]
    fn worked_example_clauses() {
        let doc = parse_vmt(EXAMPLE).unwrap();
        let text = vmt_to_horn(&doc, 1).unwrap();
        assert_eq!(
            text,
            "(set-logic HORN)
(declare-fun Inv (Int) Bool)
(assert (forall ((x Int)) (=> (= x 1) (Inv x))))
(assert (forall ((x Int) (x.next Int) (b Bool)) (=> (and (Inv x) (= x.next (ite b (+ x 1) x))) (Inv x.next))))
(assert (forall ((x Int)) (=> (and (Inv x) (not (> x 0))) false)))
(check-sat)
"
        );
        assert_eq!(vmt_to_horn(&doc, 2), Err(ConvertError::LivePropertyUnsupported(2)));
        assert_eq!(vmt_to_horn(&doc, 7), Err(ConvertError::NoSuchProperty(7)));
    }

    #[test]
    fn stateless_system_uses_a_nullary_predicate() {
        let doc = parse_vmt("(define-fun p () Bool (! true :invar-property 0))").unwrap();
        let text = vmt_to_horn(&doc, 0).unwrap();
        assert!(text.contains("(declare-fun Inv () Bool)\n"));
        assert!(text.contains("(assert (=> (and Inv (not true)) false))\n"));
    }

    #[test]
    fn predicate_name_avoids_declared_symbols() {
        let doc = parse_vmt(
            "(declare-const Inv Bool)(declare-const Inv.n Bool)(define-fun s () Bool (! Inv :next Inv.n))
             (define-fun p () Bool (! Inv :invar-property 0))",
        )
        .unwrap();
        let text = vmt_to_horn(&doc, 0).unwrap();
        assert!(text.contains("(declare-fun Inv.1 (Bool) Bool)"));
    }
}
