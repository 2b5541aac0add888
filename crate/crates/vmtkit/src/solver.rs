//! SMT solvers run as child processes over the standard text protocol.

use std::env;
use std::io::{ErrorKind, Write};
use std::path::Path;
use std::process::{Command, Stdio};

use vmtkit_core::bmc::{parse_solver_output, CheckResult, Query, Solver, SolverError};
use vmtkit_core::builtin::BuiltinSolver;

pub const SOLVER_ENV: &str = "VMTKIT_SOLVER";

/// An external solver; each query runs in a fresh process.
#[derive(Debug, Clone)]
pub struct ProcessSolver {
    argv: Vec<String>,
    /// The last query and everything the solver printed in reply.
    pub transcript: String,
}

impl ProcessSolver {
    /// `cmdline` is split on whitespace; the first word is the program.
    pub fn new(cmdline: &str) -> Result<Self, SolverError> {
        let argv: Vec<String> = cmdline.split_whitespace().map(str::to_string).collect();
        if argv.is_empty() {
            return Err(SolverError::SolverNotFound(String::new()));
        }
        Ok(ProcessSolver { argv, transcript: String::new() })
    }

    pub fn command_line(&self) -> String {
        self.argv.join(" ")
    }
}

impl Solver for ProcessSolver {
    fn check(&mut self, query: &Query) -> Result<CheckResult, SolverError> {
        let input = query.to_smtlib();
        let mut child = Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| match e.kind() {
                ErrorKind::NotFound | ErrorKind::PermissionDenied => SolverError::SolverNotFound(self.command_line()),
                _ => SolverError::Io(e.to_string()),
            })?;
        if let Some(mut stdin) = child.stdin.take() {
            // A solver that exits early closes the pipe; its output says why.
            let _ = stdin.write_all(input.as_bytes());
        }
        let output = child.wait_with_output().map_err(|e| SolverError::Io(e.to_string()))?;
        let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
        let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
        self.transcript = format!("; query\n{}; stdout\n{}; stderr\n{}", input, stdout, stderr);
        match parse_solver_output(&stdout, query) {
            Ok(r) => Ok(r),
            Err(SolverError::ParseModelError { line }) => Err(SolverError::SolverFailed {
                status: format!("{}; unreadable output: {}", output.status, line),
                transcript: format!("{}{}", stdout, stderr),
            }),
            Err(e) => Err(e),
        }
    }
}

/// The solver to use, in order of preference: the command given on the
/// command line, the one in `VMTKIT_SOLVER`, `z3 -in` when z3 is on the
/// `PATH`, and the built-in bit-blasting solver. The word `builtin` selects
/// the built-in solver explicitly.
pub fn resolve_solver(flag: Option<&str>) -> Box<dyn Solver> {
    let env_cmd = env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty());
    let chosen = flag.map(str::to_string).or(env_cmd).or_else(|| on_path("z3").then(|| "z3 -in".to_string()));
    match chosen {
        Some(cmd) if cmd.trim() == "builtin" => Box::new(BuiltinSolver),
        Some(cmd) => match ProcessSolver::new(&cmd) {
            Ok(s) => Box::new(s),
            Err(_) => Box::new(BuiltinSolver),
        },
        None => Box::new(BuiltinSolver),
    }
}

pub fn on_path(program: &str) -> bool {
    env::var_os("PATH")
        .map(|paths| env::split_paths(&paths).any(|dir| is_executable(&dir.join(program))))
        .unwrap_or(false)
}

fn is_executable(p: &Path) -> bool {
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        p.metadata().map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0).unwrap_or(false)
    }
    #[cfg(not(unix))]
    {
        p.is_file()
    }
}
