//! File, process and terminal side of vmtkit: the external solver driver,
//! counterexample reports and the command-line front end.

pub mod cli;
pub mod report;
pub mod solver;
