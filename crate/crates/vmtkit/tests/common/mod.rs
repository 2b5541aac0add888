#![allow(dead_code)]

pub mod bool_sys;
pub mod btor_check;
pub mod bv_sys;
pub mod ltl_oracle;

use std::path::{Path, PathBuf};

use vmtkit_core::bmc::Solver;
use vmtkit_core::builtin::BuiltinSolver;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

pub fn have_z3() -> bool {
    vmtkit::solver::on_path("z3")
}

/// z3 when installed, the built-in solver otherwise.
pub fn solver() -> (Box<dyn Solver>, &'static str) {
    if have_z3() {
        (vmtkit::solver::resolve_solver(Some("z3 -in")), "z3")
    } else {
        (Box::new(BuiltinSolver), "builtin")
    }
}

/// Runs the command line in-process: `(exit code, stdout, stderr)`.
pub fn run_cli(args: &[&str], stdin: &str) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("vmtkit").chain(args.iter().copied());
    let code = vmtkit::cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
