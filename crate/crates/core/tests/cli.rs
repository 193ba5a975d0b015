use std::io::Write;
use std::path::PathBuf;

use exdeco::cli::run_cli;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("exdeco").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn check_accepts_the_lemma_fixture() {
    let (code, out, _) = run(&["check", &fixture("lemma.dsl")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("proof L: accepted (16 steps, 2 kernel calls)"));
}

#[test]
fn check_reports_the_rejected_step_with_its_location() {
    let src = std::fs::read_to_string(fixture("lemma.dsl")).unwrap();
    let bad = src.replace("8: ppg g by infer", "8: ppg g by typecheck");
    let f = temp(&bad);
    let (code, out, _) = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let line = src.lines().position(|l| l.contains("8: ppg g")).unwrap() + 1;
    assert!(out.contains(&format!(":{line}:3: error: proof L rejected: step 8 [path 1.1] by typecheck")), "{out}");
}

#[test]
fn check_notices_a_proof_of_the_wrong_statement() {
    let src = std::fs::read_to_string(fixture("lemma.dsl")).unwrap();
    let f = temp(&src.replace("lemma L: g o empty[X] == empty[Y]", "lemma L: g o empty[X] ~~ empty[Y]"));
    let (code, out, _) = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("concludes"));
}

#[test]
fn check_merges_reports_in_input_order() {
    let (code, out, _) = run(&["check", &fixture("tour.dsl"), &fixture("lemma.dsl"), &fixture("bad_eq.dsl")]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].ends_with("tour.dsl: no proofs"));
    assert!(lines[1].contains("lemma.dsl: proof L: accepted"));
    assert!(lines[2].ends_with("bad_eq.dsl: no proofs"));
}

#[test]
fn modelcheck_refutes_the_strong_untag_equation() {
    let (code, out, _) = run(&["modelcheck", "--bound", "2", &fixture("bad_eq.dsl")]);
    assert_eq!(code, 1);
    assert!(out.contains("Weak: holds in 3 models"), "{out}");
    assert!(out.contains("Bad: counterexample"));
    assert!(out.contains("input  raise T t0"));
    assert!(out.contains("lhs    t0"));
    assert!(out.contains("rhs    raise T t0"));
    assert!(out.contains("T = {t0}"));
}

#[test]
fn modelcheck_passes_the_weak_equation_alone() {
    let (code, out, _) = run(&["modelcheck", "--bound", "3", "--eq", "Weak", &fixture("bad_eq.dsl")]);
    assert_eq!(code, 0, "{out}");
    let (code, _, err) = run(&["modelcheck", "--eq", "Missing", &fixture("bad_eq.dsl")]);
    assert_eq!(code, 2);
    assert!(err.contains("Missing"));
}

#[test]
fn modelcheck_with_zero_budget_examines_nothing() {
    let (code, out, _) = run(&["modelcheck", "--budget", "0", &fixture("bad_eq.dsl")]);
    assert_eq!(code, 0);
    assert!(out.contains("Bad: holds in 0 models"));
}

#[test]
fn infer_prints_arity_and_decoration() {
    let (code, out, _) = run(&["infer", &fixture("bad_eq.dsl"), "--term", "tag[T]"]);
    assert_eq!(code, 0);
    assert_eq!(out, "T -> 0, propagator\n");
    let (code, out, _) = run(&["infer", &fixture("tour.dsl")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["raise_r : R -> A, propagator", "guarded : T -> A, propagator", "k : T -> A, catcher"]);
}

#[test]
fn infer_rejects_ill_typed_terms() {
    let (code, out, _) = run(&["infer", &fixture("bad_eq.dsl"), "--term", "tag[T] o tag[T]"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("error:"));
    let (code, _, err) = run(&["infer", &fixture("bad_eq.dsl"), "--term", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("nope"));
    let (code, _, err) = run(&["infer", &fixture("bad_eq.dsl"), "--term", "tag[T] o"]);
    assert_eq!(code, 2);
    assert!(err.contains("syntax error"));
}

#[test]
fn elaborate_prints_core_forms() {
    let (code, out, _) = run(&["elaborate", &fixture("bad_eq.dsl"), "--term", "throw[T,T]"]);
    assert_eq!(code, 0);
    assert_eq!(out, "empty[T] o tag[T]\n");
    let (code, out, _) = run(&["elaborate", &fixture("tour.dsl")]);
    assert_eq!(code, 0);
    assert!(out.contains("guarded = downcast([id[A] | [h o cast[R,T] | h o untag[T]] o untag[R]] o h)"), "{out}");
    assert!(!out.contains("try"));
}

#[test]
fn eval_reports_each_equation_in_each_model() {
    let (code, out, _) = run(&["eval", &fixture("tour.dsl")]);
    assert_eq!(code, 0);
    assert_eq!(out, "Unit in M: holds\nCaught in M: holds\n");
    let src = format!("{}\neq Wrong: h o f == h o f o h o f\n", std::fs::read_to_string(fixture("tour.dsl")).unwrap());
    let f = temp(&src);
    let (code, out, _) = run(&["eval", f.path().to_str().unwrap(), "--eq", "Wrong"]);
    assert_eq!(code, 1);
    assert!(out.contains("Wrong in M: fails"), "{out}");
    let (code, _, _) = run(&["eval", &fixture("bad_eq.dsl")]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_exit_with_usage_status() {
    let f = temp("type A\nterm t = id[A] o\n");
    let (code, _, err) = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains(":3:1: error:") || err.contains(":2:"), "{err}");
    let f = temp("");
    let (code, _, err) = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("missing signature"));
    let (code, _, _) = run(&["check", "/nonexistent/file.dsl"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_with_status_two() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["modelcheck", "--bound", "x", "f"]).0, 2);
    assert_eq!(run(&["rank", "--modulus", "6"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["check", "infer", "elaborate", "eval", "modelcheck", "rank"] {
        assert!(out.contains(sub));
    }
}

#[test]
fn rank_prints_one_pair_per_factor() {
    let m = temp("2 2\n3 1\n0 2\n");
    let path = m.path().to_str().unwrap();
    for mode in ["restart", "continue"] {
        let (code, out, _) = run(&["rank", "--modulus", "6", "--matrix", path, "--mode", mode]);
        assert_eq!(code, 0);
        assert_eq!(out, "1 3\n1 2\n");
    }
    let m = temp("1 1\n2\n");
    let (_, out, _) = run(&["rank", "--modulus", "6", "--matrix", m.path().to_str().unwrap()]);
    assert_eq!(out, "0 2\n1 3\n");
}

#[test]
fn rank_handles_moduli_beyond_machine_words() {
    let m = temp("2 2\n1 0\n0 1\n");
    let big = "340282366920938463463374607431768211457";
    let (code, out, _) = run(&["rank", "--modulus", big, "--matrix", m.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, format!("2 {big}\n"));
}

#[test]
fn rank_rejects_bad_input() {
    let m = temp("2 2\n1 2 3\n");
    assert_eq!(run(&["rank", "--modulus", "6", "--matrix", m.path().to_str().unwrap()]).0, 2);
    let m = temp("1 1\n1\n");
    let p = m.path().to_str().unwrap();
    assert_eq!(run(&["rank", "--modulus", "1", "--matrix", p]).0, 2);
    assert_eq!(run(&["rank", "--modulus", "6", "--matrix", p, "--mode", "sideways"]).0, 2);
}
