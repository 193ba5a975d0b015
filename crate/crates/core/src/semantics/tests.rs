use super::*;
use crate::signature::SignatureDecl;

fn two_exc() -> Signature {
    SignatureDecl::new().exception("T").exception("R").validate().unwrap()
}

fn model(sig: &Signature, sizes: &[usize]) -> Model {
    Model::new(sig, sizes, vec![], BTreeMap::new()).unwrap()
}

fn exc(ty: usize, value: usize) -> EffValue {
    EffValue::Exceptional(ExcValue { ty, value })
}

#[test]
fn tag_injects_into_exc() {
    let s = two_exc();
    let m = model(&s, &[2, 1]);
    let f = interpret(&s, &m, &Term::tag("T")).unwrap();
    assert_eq!(f.apply(&m, EffValue::Ordinary(1)), exc(0, 1));
    let f = interpret(&s, &m, &Term::tag("R")).unwrap();
    assert_eq!(f.apply(&m, EffValue::Ordinary(0)), exc(1, 0));
    assert!(f.satisfies(Decoration::Propagator));
    assert!(!f.satisfies(Decoration::Pure) || m.exc_size(1) == 0);
}

#[test]
fn untag_mismatch_propagates_without_hierarchy() {
    let s = two_exc();
    let m = model(&s, &[2, 2]);
    let u = interpret(&s, &m, &Term::untag("T")).unwrap();
    assert_eq!(u.apply(&m, exc(1, 1)), exc(1, 1));
    assert_eq!(u.apply(&m, exc(0, 1)), EffValue::Ordinary(1));
}

#[test]
fn throw_raises_its_argument() {
    let s = SignatureDecl::new().ty("Y").exception("T").validate().unwrap();
    let m = model(&s, &[2, 3]);
    let f = interpret(&s, &m, &Term::throw("T", "Y")).unwrap();
    assert_eq!(f.apply(&m, EffValue::Ordinary(2)), exc(0, 2));
    assert_eq!(f.cod, Ty::named("Y"));
}

#[test]
fn untag_after_tag_is_weakly_but_not_strongly_the_identity() {
    let s = SignatureDecl::new().exception("T").validate().unwrap();
    let lhs = Term::compose(Term::untag("T"), Term::tag("T"));
    let weak = Equation::weak(lhs.clone(), Term::id("T"));
    let strong = Equation::strong(lhs, Term::id("T"));
    for m in enumerate_models(&s, 3, 1000) {
        assert!(eval_equation(&s, &m, &weak).unwrap());
    }
    let m = model(&s, &[1]);
    assert!(!eval_equation(&s, &m, &strong).unwrap());
    assert_eq!(equation_witness(&s, &m, &strong).unwrap(), Some(exc(0, 0)));
    // with an empty carrier there is nothing to tell them apart
    assert!(eval_equation(&s, &model(&s, &[0]), &strong).unwrap());
}

#[test]
fn reflexivity_holds() {
    let s = SignatureDecl::new().ty("A").exception("T").op("f", "A", "T").validate().unwrap();
    let e = Equation::strong(Term::op("f"), Term::op("f"));
    for m in enumerate_models(&s, 2, 10_000) {
        assert!(eval_equation(&s, &m, &e).unwrap());
    }
}

#[test]
fn catcher_op_tables_cover_exceptions() {
    let s = SignatureDecl::new()
        .ty("A")
        .exception("T")
        .op_decorated("k", "A", "A", Decoration::Catcher)
        .validate()
        .unwrap();
    // |A| = 1, |T| = 1: inputs a0, raise T t0
    let m = Model::new(&s, &[1, 1], vec![vec![1, 0]], BTreeMap::new()).unwrap();
    let k = interpret(&s, &m, &Term::op("k")).unwrap();
    assert_eq!(k.apply(&m, EffValue::Ordinary(0)), exc(0, 0));
    assert_eq!(k.apply(&m, exc(0, 0)), EffValue::Ordinary(0));
    assert!(Model::new(&s, &[1, 1], vec![vec![0]], BTreeMap::new()).is_err());
}

#[test]
fn hierarchy_untag_goes_through_cast() {
    let s = SignatureDecl::new()
        .exception("T")
        .exception("R")
        .subtype("R", "T")
        .validate()
        .unwrap();
    let mut casts = BTreeMap::new();
    casts.insert((1, 0), vec![1, 1]);
    let m = Model::new(&s, &[2, 2], vec![], casts).unwrap();
    let u = interpret(&s, &m, &Term::untag("T")).unwrap();
    assert_eq!(u.apply(&m, exc(1, 0)), EffValue::Ordinary(1));
    let u = interpret(&s, &m, &Term::untag("R")).unwrap();
    assert_eq!(u.apply(&m, exc(0, 0)), exc(0, 0));
    let c = interpret(&s, &m, &Term::cast("R", "T")).unwrap();
    assert!(c.satisfies(Decoration::Pure));
}

#[test]
fn invalid_models_are_rejected() {
    let s = SignatureDecl::new().ty("A").op("f", "A", "A").validate().unwrap();
    assert!(matches!(
        Model::new(&s, &[2], vec![vec![0, 2]], BTreeMap::new()),
        Err(SemanticsError::InvalidModel(_))
    ));
    assert!(Model::new(&s, &[2, 1], vec![vec![0, 1]], BTreeMap::new()).is_err());
    let other = SignatureDecl::new().ty("B").validate().unwrap();
    let m = model(&other, &[1]);
    assert!(matches!(interpret(&s, &m, &Term::id("A")), Err(SemanticsError::InvalidModel(_))));
}

#[test]
fn exceptions_with_empty_carriers_decode() {
    let s = SignatureDecl::new().exception("A").exception("B").exception("C").validate().unwrap();
    let m = model(&s, &[0, 2, 0]);
    assert_eq!(m.exc_total(), 2);
    assert_eq!(m.exc_at(0), ExcValue { ty: 1, value: 0 });
    assert_eq!(m.exc_at(1), ExcValue { ty: 1, value: 1 });
    let m = model(&s, &[1, 0, 1]);
    assert_eq!(m.exc_at(1), ExcValue { ty: 2, value: 0 });
}

#[test]
fn dsl_rendering_lists_tables() {
    let s = SignatureDecl::new().ty("A").exception("T").op_decorated("f", "A", "A", Decoration::Propagator).validate().unwrap();
    let m = Model::new(&s, &[2, 1], vec![vec![1, 2]], BTreeMap::new()).unwrap();
    let d = m.to_dsl("M");
    assert!(d.contains("A = {a0, a1}"), "{d}");
    assert!(d.contains("f = {a0 -> a1, a1 -> raise T t0}"), "{d}");
}

mod laws {
    use super::*;
    use proptest::prelude::*;

    fn sig() -> Signature {
        SignatureDecl::new()
            .ty("A")
            .exception("T")
            .exception("R")
            .op("f", "A", "T")
            .op_decorated("p", "T", "A", Decoration::Propagator)
            .op_decorated("c", "A", "A", Decoration::Catcher)
            .subtype("R", "T")
            .validate()
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tables_obey_the_inferred_decoration(seed in any::<u64>()) {
            let s = sig();
            let mut g = TermGen::new(&s, seed);
            let models: Vec<_> = enumerate_models_seeded(&s, 2, 50, seed).collect();
            if let Some((t, _)) = g.any_term(Decoration::Catcher) {
                let d = crate::term::infer_decoration(&s, &t).unwrap();
                for m in &models {
                    prop_assert!(interpret(&s, m, &t).unwrap().satisfies(d), "{} in\n{}", t, m.to_dsl("M"));
                }
            }
        }
    }
}
