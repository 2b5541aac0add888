//! Core of vmtkit: VMT-LIB transition systems without any IO.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches the
//! file system, processes or the terminal lives in the `vmtkit` crate.

#![no_std]

extern crate alloc;

pub mod elab;
pub mod error;
pub mod ltl;
pub mod bmc;
pub mod builtin;
pub mod convert;
pub mod model;
pub mod oracle;
pub mod sat;
pub mod script;
pub mod sexpr;
pub mod sort;
pub mod term;
pub mod value;

pub use error::FrontendError;
pub use sexpr::Pos;
pub use sort::Sort;
pub use term::{Op, Term};
