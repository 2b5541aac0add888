//! Translations between VMT-LIB and other model-checking input formats.

use alloc::string::String;

mod btor;
mod horn;
mod smv;

pub use btor::{btor_to_vmt, vmt_to_btor};
pub use horn::vmt_to_horn;
pub use smv::vmt_to_nuxmv;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    #[error("property {0} is a live property; only invariants can be converted to this format")]
    LivePropertyUnsupported(u64),
    #[error("no property with index {0}")]
    NoSuchProperty(u64),
    #[error("the system contains quantifiers")]
    QuantifiedSystem,
    #[error("sort {0} cannot be expressed in the target format")]
    UnsupportedSort(String),
    #[error("`{0}` cannot be expressed in the target format")]
    UnsupportedSymbol(String),
    #[error("line {line}: {reason}")]
    MalformedBtor { line: usize, reason: String },
    #[error("unsupported BTOR2 node `{0}`")]
    UnsupportedNode(String),
}

impl ConvertError {
    pub fn code(&self) -> &'static str {
        match self {
            ConvertError::LivePropertyUnsupported(_) => "LivePropertyUnsupported",
            ConvertError::NoSuchProperty(_) => "NoSuchProperty",
            ConvertError::QuantifiedSystem => "QuantifiedSystem",
            ConvertError::UnsupportedSort(_) => "UnsupportedSort",
            ConvertError::UnsupportedSymbol(_) => "UnsupportedSymbol",
            ConvertError::MalformedBtor { .. } => "MalformedBtor",
            ConvertError::UnsupportedNode(_) => "UnsupportedNode",
        }
    }
}

/// Splits nested conjunctions into their parts; `true` contributes nothing.
pub(crate) fn conjuncts(t: &crate::Term, out: &mut alloc::vec::Vec<crate::Term>) {
    match t {
        crate::Term::App(crate::Op::And, args, _) => args.iter().for_each(|a| conjuncts(a, out)),
        crate::Term::Annot(inner, _) => conjuncts(inner, out),
        t if t.is_true() => {}
        t => out.push(t.clone()),
    }
}
