mod common;

use std::io::Write;
use std::os::unix::fs::PermissionsExt;

use common::{data, have_z3, read, run_cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vmtkit::cli::{EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_OK, EXIT_SOLVER};

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

const TOGGLE: &str = "(declare-fun v () Bool)
(declare-fun v.next () Bool)
(declare-fun i () Bool)
(define-fun sv () Bool (! v :next v.next))
(define-fun init () Bool (! (not v) :init true))
(define-fun trans () Bool (! (= v.next (xor v i)) :trans true))
(define-fun p0 () Bool (! (not v) :invar-property 0))
(define-fun p1 () Bool (! v :live-property 1))
";

#[test]
fn check_reports_clean_files_and_errors() {
    let (code, out, _) = run_cli(&["check", &path("data/counter.vmt")], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));

    let (code, out, _) = run_cli(&["check", &path("corpus/warn_no_properties.vmt")], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("warning[NoProperties]"), "{}", out);

    let (code, out, _) = run_cli(&["check", &path("corpus/err_unbalanced.vmt")], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("err_unbalanced.vmt:2:1: error[UnbalancedParens]"), "{}", out);
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = run_cli(&["bmc", "/nonexistent/file.vmt"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[Io]"), "{}", err);
}

#[test]
fn print_is_idempotent() {
    for name in ["data/counter.vmt", "corpus/ok_bitvec.vmt", "corpus/ok_quoted.vmt", "corpus/ok_macros_let.vmt"] {
        let (code, once, err) = run_cli(&["print", &path(name)], "");
        assert_eq!(code, EXIT_OK, "{}: {}", name, err);
        let (code, twice, err) = run_cli(&["print"], &once);
        assert_eq!(code, EXIT_OK, "{}: {}", name, err);
        assert_eq!(once, twice, "{}", name);
    }
}

#[test]
fn invariant_counterexample_with_builtin_solver() {
    let (code, out, err) = run_cli(&["bmc", "--solver-cmd", "builtin", "-k", "4"], TOGGLE);
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}", err);
    assert!(out.starts_with("property: 0\nresult: counterexample\nbound: 1\n"), "{}", out);
    assert!(out.contains("step 1:\n  v = true"), "{}", out);
}

#[test]
fn live_counterexample_with_builtin_solver() {
    let text = TOGGLE.replace(":live-property 1", ":live-property 1)) (define-fun q () Bool (! (not v) :live-property 2");
    let (code, out, err) = run_cli(&["live", "--solver-cmd", "builtin", "-p", "1", "-k", "3"], &text);
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}", err);
    assert!(out.contains("loop-start:"), "{}", out);
    let (code, out, _) = run_cli(&["live", "--solver-cmd", "builtin", "-p", "2", "-k", "3"], &text);
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}", out);
}

#[test]
fn property_selection_errors() {
    let counter = path("data/counter.vmt");
    let (code, _, err) = run_cli(&["bmc", &counter, "-p", "2"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[WrongPropertyKind]"), "{}", err);
    let (code, _, err) = run_cli(&["live", &counter, "-p", "1"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[WrongPropertyKind]"), "{}", err);
    let (code, _, err) = run_cli(&["bmc", &counter, "-p", "9"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[NoSuchProperty]"), "{}", err);
}

#[test]
fn quantified_system_is_rejected_by_bmc() {
    let (code, _, err) = run_cli(&["bmc", &path("corpus/ok_quantifier.vmt"), "--solver-cmd", "builtin"], "");
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[QuantifiedSystem]"), "{}", err);
}

#[test]
fn builtin_solver_rejects_integers() {
    let (code, _, err) = run_cli(&["bmc", &path("data/counter.vmt"), "--solver-cmd", "builtin"], "");
    assert_eq!(code, EXIT_SOLVER);
    assert!(err.contains("error[SolverUnsupported]"), "{}", err);
}

#[test]
fn missing_solver_binary() {
    let (code, _, err) = run_cli(&["bmc", "--solver-cmd", "/nonexistent/solver"], TOGGLE);
    assert_eq!(code, EXIT_SOLVER);
    assert!(err.contains("error[SolverNotFound]"), "{}", err);
}

#[test]
fn garbage_from_solver_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("solver.sh");
    let mut f = std::fs::File::create(&script).unwrap();
    writeln!(f, "#!/bin/sh\ncat > /dev/null\necho segfault").unwrap();
    drop(f);
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let (code, out, err) = run_cli(&["bmc", "--solver-cmd", script.to_str().unwrap()], TOGGLE);
    assert_eq!(code, EXIT_SOLVER, "{}{}", out, err);
    assert!(err.contains("error[Solver"), "{}", err);
}

#[test]
fn sim_checks_both_property_kinds() {
    let counter = path("data/counter.vmt");
    let (code, out, _) = run_cli(&["sim", &counter, "--int-bounds", "0:6"], "");
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("result: holds on every reachable state"), "{}", out);
    let (code, out, _) = run_cli(&["sim", &counter, "-p", "2", "--int-bounds", "0:20"], "");
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    assert!(out.contains("loop-start: 0"), "{}", out);
    let (code, out, _) = run_cli(&["sim", "-p", "0"], TOGGLE);
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}", out);
    let (code, _, err) = run_cli(&["sim", &counter, "--int-bounds", "5"], "");
    assert_eq!(code, EXIT_INPUT, "{}", err);
}

#[test]
fn btor_round_trip_through_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let btor = dir.path().join("toggle.btor2");
    let (code, _, err) = run_cli(&["to-btor", "-o", btor.to_str().unwrap()], &TOGGLE.replace(":live-property", ":invar-property"));
    assert_eq!(code, EXIT_OK, "{}", err);
    let text = std::fs::read_to_string(&btor).unwrap();
    common::btor_check::check_btor(&text).unwrap();

    let (code, vmt, err) = run_cli(&["from-btor", btor.to_str().unwrap()], "");
    assert_eq!(code, EXIT_OK, "{}", err);
    let (code, out, _) = run_cli(&["bmc", "--solver-cmd", "builtin", "-k", "3"], &vmt);
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    assert!(out.contains("bound: 1\n"), "{}", out);
}

#[test]
fn to_btor_rejects_live_properties() {
    let (code, _, err) = run_cli(&["to-btor"], TOGGLE);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[LivePropertyUnsupported]"), "{}", err);
}

#[test]
fn to_horn_matches_golden() {
    let (code, out, err) = run_cli(&["to-horn", &path("data/counter.vmt")], "");
    assert_eq!(code, EXIT_OK, "{}", err);
    assert_eq!(out, read("data/counter.horn.smt2"));
}

#[test]
fn to_nuxmv_output() {
    let (code, out, err) = run_cli(&["to-nuxmv", &path("data/counter.vmt")], "");
    assert_eq!(code, EXIT_OK, "{}", err);
    assert!(out.starts_with("MODULE main\n"), "{}", out);
    assert!(out.contains("INVARSPEC x > 0\n"), "{}", out);
    assert!(out.contains("LTLSPEC F G (x > 10)\n"), "{}", out);
}

#[test]
fn ltl_compile_adds_a_live_property() {
    let (code, out, err) = run_cli(&["ltl-compile", "-f", "G F v"], TOGGLE);
    assert_eq!(code, EXIT_OK, "{}", err);
    assert!(out.contains(":live-property 2)"), "{}", out);
    // The input can keep v false forever, so G F v has a counterexample.
    let (code, res, err) = run_cli(&["live", "--solver-cmd", "builtin", "-p", "2", "-k", "4"], &out);
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}{}", res, err);

    let (code, out, err) = run_cli(&["ltl-compile", "-f", "G F v", "--index", "7"], TOGGLE);
    assert_eq!(code, EXIT_OK, "{}", err);
    assert!(out.contains(":live-property 7)"), "{}", out);

    let (code, _, err) = run_cli(&["ltl-compile", "-f", "F i"], TOGGLE);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error[AtomUsesInput]"), "{}", err);
    let (code, _, err) = run_cli(&["ltl-compile", "-f", "F (v"], TOGGLE);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.starts_with("<formula>:"), "{}", err);
}

#[test]
fn fuzzed_arguments_never_panic() {
    const WORDS: &[&str] = &[
        "check", "print", "bmc", "live", "sim", "to-horn", "to-btor", "from-btor", "to-nuxmv", "ltl-compile",
        "-p", "-k", "-o", "-f", "--index", "--int-bounds", "--solver-cmd", "builtin", "0", "1", "-1", "99999999999999999999",
        "0:3", "3:0", ":", "x", "", "-", "--", "G F v", "F (", "/nonexistent", "--help", "-V",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..400 {
        let n = rng.gen_range(0..6);
        let args: Vec<&str> = (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
        let result = std::panic::catch_unwind(|| run_cli(&args, TOGGLE));
        let (code, _, _) = result.unwrap_or_else(|_| panic!("panicked on {:?}", args));
        assert!(code <= 4, "{:?} gave {}", args, code);
    }
}

/// The Horn encoding is satisfiable exactly when the invariant holds.
#[test]
fn horn_clauses_agree_with_z3() {
    if !have_z3() {
        eprintln!("z3 not found, skipping");
        return;
    }
    let safe = read("data/counter.vmt");
    let unsafe_ = safe.replace("(> x 0)", "(< x 3)");
    for (text, expect) in [(safe, "sat"), (unsafe_, "unsat")] {
        let (code, horn, err) = run_cli(&["to-horn"], &text);
        assert_eq!(code, EXIT_OK, "{}", err);
        let mut child = std::process::Command::new("z3")
            .args(["-in", "-T:30"])
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(horn.as_bytes()).unwrap();
        let out = child.wait_with_output().unwrap();
        let reply = String::from_utf8_lossy(&out.stdout);
        assert_eq!(reply.lines().next(), Some(expect), "{}\n{}", horn, reply);
    }
}

#[test]
fn z3_finds_the_counter_live_violation() {
    if !have_z3() {
        eprintln!("z3 not found, skipping");
        return;
    }
    let (code, out, err) = run_cli(&["live", &path("data/counter.vmt"), "--solver-cmd", "z3 -in", "-k", "3"], "");
    assert_eq!(code, EXIT_COUNTEREXAMPLE, "{}", err);
    assert!(out.contains("loop-start: 0"), "{}", out);
    let (code, out, err) = run_cli(&["bmc", &path("data/counter.vmt"), "--solver-cmd", "z3 -in", "-k", "6"], "");
    assert_eq!(code, EXIT_OK, "{}", err);
    assert!(out.contains("result: no counterexample up to 6"), "{}", out);
}
