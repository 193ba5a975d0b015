use super::*;
use crate::kernel::{check_proof, Mode};
use crate::semantics::{enumerate_models, eval_equation};
use crate::term::Term;

const LEMMA: &str = include_str!("../../fixtures/lemma.dsl");
const TOUR: &str = include_str!("../../fixtures/tour.dsl");
const BAD: &str = include_str!("../../fixtures/bad_eq.dsl");

fn eq_of(src: &str) -> EqDef {
    let f = parse(src).unwrap();
    f.items
        .into_iter()
        .find_map(|i| match i.node {
            Item::Eq(e) => Some(e),
            _ => None,
        })
        .unwrap()
}

#[test]
fn strong_lemma_statement() {
    let e = eq_of("type X\ntype Y\nop ppg g : X -> Y\nlemma L: g o empty[X] == empty[Y]");
    assert!(e.lemma);
    assert_eq!(e.name, "L");
    assert_eq!(e.equation.lhs, Term::compose(Term::op("g"), Term::empty("X")));
    assert_eq!(e.equation.rhs, Term::empty("Y"));
    assert_eq!(e.equation.mode, Mode::Strong);
}

#[test]
fn weak_equation_statement() {
    let e = eq_of("exception T\neq E: untag[T] o tag[T] ~~ id[T]");
    assert!(!e.lemma);
    assert_eq!(e.equation.mode, Mode::Weak);
    assert_eq!(e.equation.lhs, Term::compose(Term::untag("T"), Term::tag("T")));
}

#[test]
fn empty_file_lacks_a_signature() {
    for src in ["", "   \n# nothing\n"] {
        match parse(src) {
            Err(SurfaceError::Syntax(d)) => assert!(d.message.contains("missing signature")),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn composition_is_right_associative() {
    let t = parse_term("f o g o h").unwrap();
    assert_eq!(t, Term::compose(Term::op("f"), Term::compose(Term::op("g"), Term::op("h"))));
    let t = parse_term("(f o g) o h").unwrap();
    assert_eq!(t, Term::compose(Term::compose(Term::op("f"), Term::op("g")), Term::op("h")));
}

#[test]
fn every_term_form_parses_back_from_its_display() {
    for src in [
        "id[X]",
        "empty[0]",
        "tag[T] o f",
        "[g | k o untag[T]]",
        "case{T => f, R => untag[R]}",
        "case[Y]{}",
        "downcast([id[Y] | untag[T]])",
        "cast[R,T]",
        "throw[T,0]",
        "try(f o g) catch{T => h, R => h o cast[R,T]}",
    ] {
        let t = parse_term(src).unwrap();
        assert_eq!(t.to_string(), src);
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }
}

#[test]
fn syntax_errors_carry_locations() {
    let err = parse("type A\nop f : A => A\n").unwrap_err();
    let d = err.diagnostic();
    assert_eq!((d.at.line, d.at.col), (2, 10));
    let err = parse("type A\nterm t = id[A] o\n").unwrap_err();
    assert_eq!(err.diagnostic().at.line, 2);
    let err = parse("type A\n  $").unwrap_err();
    assert_eq!(err.diagnostic().at, Span { line: 2, col: 3 });
    assert!(matches!(parse("type op"), Err(SurfaceError::Syntax(_))));
}

#[test]
fn unknown_identifiers_are_reported_at_resolution() {
    for src in [
        "type A\neq E: f == id[A]",
        "type A\nterm t = id[B]",
        "type A\nop f : A -> B",
        "exception T\nexception R extends A",
        "type A\nproof P {\n 1: type A by nonsense\n}",
        "type A\nproof P {\n 1: type A by type(2)\n}",
        "type A\nterm t = u\nterm u = id[A]",
    ] {
        let f = parse(src).unwrap();
        assert!(matches!(resolve(&f), Err(SurfaceError::UnknownIdentifier(_))), "{src}");
    }
}

#[test]
fn inconsistent_declarations_are_rejected() {
    for src in [
        "type A\ntype A",
        "type A\nterm t = id[A]\ntype B",
        "type A\nexception R extends A",
        "type A\nmodel M {\n}",
        "type A\nmodel M {\n A = {a, a}\n}",
        "type A\nop f : A -> A\nmodel M {\n A = {a}\n f = {}\n}",
        "type A\nop f : A -> A\nmodel M {\n A = {a}\n f = {a -> a, a -> a}\n}",
        "exception T\nop f : T -> T\nmodel M {\n T = {t}\n f = {t -> raise T t}\n}",
    ] {
        let f = parse(src).unwrap();
        assert!(matches!(resolve(&f), Err(SurfaceError::Invalid(_))), "{src}");
    }
}

#[test]
fn named_terms_are_expanded() {
    let doc = load("type A\nop f : A -> A\nterm t = f o f\nterm u = t o id[A]").unwrap();
    assert_eq!(
        doc.term("u").unwrap().term,
        Term::compose(Term::compose(Term::op("f"), Term::op("f")), Term::id("A"))
    );
}

#[test]
fn lemma_fixture_is_accepted() {
    let doc = load(LEMMA).unwrap();
    assert!(doc.diagnostics.is_empty());
    let p = &doc.proofs[0];
    assert_eq!(p.proof.node_count(), 16);
    assert_eq!(p.steps.len(), 16);
    assert!(check_proof(&doc.signature, &p.proof).is_accepted());
    assert_eq!(p.proof.conclusion, crate::kernel::Judgment::Eq(doc.equation("L").unwrap().equation.clone()));
}

#[test]
fn unused_steps_are_warned_about() {
    let doc = load("type A\nproof P {\n 1: type A by type\n 2: type A by type\n}").unwrap();
    assert_eq!(doc.diagnostics.len(), 1);
    assert_eq!(doc.diagnostics[0].at.line, 3);
    assert_eq!(doc.diagnostics[0].severity, Severity::Warning);
}

#[test]
fn shadowed_handlers_get_a_note() {
    let doc = load("exception T\nop ppg g : T -> T\nterm t = try(g) catch{T => g, T => id[T]}").unwrap();
    assert_eq!(doc.diagnostics.len(), 1);
    assert_eq!(doc.diagnostics[0].severity, Severity::Note);
    assert!(doc.diagnostics[0].message.contains("handler 2"));
}

#[test]
fn hand_written_model_reads_back() {
    let doc = load(TOUR).unwrap();
    let m = &doc.model("M").unwrap().model;
    let sig = &doc.signature;
    let text = m.to_dsl("M");
    let again = load(&format!("{}\n{text}", signature_text(TOUR))).unwrap();
    assert_eq!(&again.model("M").unwrap().model, m);
    for e in &doc.equations {
        assert!(eval_equation(sig, m, &e.equation).unwrap(), "{}", e.name);
    }
}

/// The declaration lines of a fixture.
fn signature_text(src: &str) -> String {
    src.lines()
        .filter(|l| ["type ", "exception ", "op ", "hierarchy"].iter().any(|k| l.starts_with(k)))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn enumerated_models_read_back() {
    let sig_src = signature_text(TOUR);
    let doc = load(&sig_src).unwrap();
    for m in enumerate_models(&doc.signature, 2, 50_000).step_by(97) {
        let again = load(&format!("{sig_src}\n{}", m.to_dsl("N"))).unwrap();
        assert_eq!(again.models[0].model, m);
    }
}

#[test]
fn fixtures_round_trip_through_the_printer() {
    for src in [LEMMA, TOUR, BAD] {
        let f = parse(src).unwrap();
        let printed = print(&f);
        let g = parse(&printed).unwrap();
        assert_eq!(f, g);
        assert_eq!(print(&g), printed);
    }
}

mod props {
    use super::*;
    use crate::semantics::TermGen;
    use crate::signature::SignatureDecl;
    use proptest::prelude::*;

    fn sig() -> crate::signature::Signature {
        SignatureDecl::new()
            .ty("A")
            .exception("T")
            .exception("R")
            .subtype("R", "T")
            .op("f", "A", "T")
            .op_decorated("h", "T", "A", crate::term::Decoration::Propagator)
            .validate()
            .unwrap()
    }

    const HEADER: &str = "type A\nexception T\nexception R extends T\nop f : A -> T\nop ppg h : T -> A\n";

    fn in_text(src: &str, at: Span) -> bool {
        let lines: Vec<&str> = src.split('\n').collect();
        at.line >= 1
            && at.line <= lines.len().max(1)
            && at.col >= 1
            && at.col <= lines.get(at.line - 1).map_or(0, |l| l.chars().count()).max(1)
    }

    proptest! {
        #[test]
        fn printing_is_stable(seed in any::<u64>()) {
            let s = sig();
            let mut g = TermGen::new(&s, seed);
            let mut src = String::from(HEADER);
            for i in 0..6 {
                if let Some((t, _)) = g.any_term(crate::term::Decoration::Catcher) {
                    src += &format!("term t{i} = {t}\n");
                    src += &format!("eq e{i}: {t} ~~ {t}\n");
                }
            }
            let f = parse(&src).unwrap();
            let printed = print(&f);
            let g2 = parse(&printed).unwrap();
            prop_assert_eq!(&f, &g2);
            prop_assert_eq!(print(&g2), printed);
        }

        #[test]
        fn error_locations_lie_inside_the_text(src in "[a-z0-9 \\n\\[\\]{}():=>~|,#$-]{0,60}") {
            match load(&src) {
                Ok(_) => {}
                Err(e) => prop_assert!(in_text(&src, e.diagnostic().at), "{:?} for {:?}", e, src),
            }
        }

        #[test]
        fn mangled_fixture_errors_lie_inside_the_text(cut in 0usize..600, junk in "[\\]\\[o=:~ ]{1,3}") {
            let mut src: String = LEMMA.chars().take(cut).collect();
            src += &junk;
            if let Err(e) = load(&src) {
                prop_assert!(in_text(&src, e.diagnostic().at), "{:?}", e);
            }
        }
    }
}
