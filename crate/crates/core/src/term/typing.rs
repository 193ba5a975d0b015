use std::collections::HashSet;

use thiserror::Error;

use super::{Arity, Clause, Decoration, Term, Ty};
use crate::signature::{Signature, TypeName};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("`{0}` is not an exceptional type")]
    NotExceptional(TypeName),
    #[error("arity mismatch in {context}: expected {expected}, found {found}")]
    ArityMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("illegal cast from `{0}` to `{1}`: not a subtype")]
    IllegalCast(TypeName, TypeName),
    #[error("try-catch needs at least one handler")]
    EmptyHandlerList,
    #[error("tag-case branches must cover each exceptional type exactly once: {0}")]
    BadBranches(String),
    #[error("cannot determine the codomain of an empty tag-case; annotate it as case[Y]{{}}")]
    CannotInferCodomain,
    #[error("{context} must be at most a propagator, but is a {found}")]
    HandlerNotPropagator {
        context: &'static str,
        found: Decoration,
    },
    #[error("term is a {inferred}, which exceeds the asserted {asserted}")]
    DecorationExceeded {
        asserted: Decoration,
        inferred: Decoration,
    },
}

fn mismatch(context: &str, expected: &Ty, found: &Ty) -> TermError {
    TermError::ArityMismatch {
        context: context.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn check_ty(sig: &Signature, x: &Ty) -> Result<(), TermError> {
    match x {
        Ty::Zero => Ok(()),
        Ty::Named(n) if sig.is_type(n) => Ok(()),
        Ty::Named(n) => Err(TermError::UnknownType(n.to_string())),
    }
}

fn check_exc(sig: &Signature, t: &TypeName) -> Result<(), TermError> {
    if !sig.is_type(t) {
        Err(TermError::UnknownType(t.to_string()))
    } else if !sig.is_exceptional(t) {
        Err(TermError::NotExceptional(t.clone()))
    } else {
        Ok(())
    }
}

/// Checks that `clauses` mention each exceptional type of `sig` exactly once.
fn check_branch_cover(sig: &Signature, clauses: &[Clause]) -> Result<(), TermError> {
    let mut seen = HashSet::new();
    for (t, _) in clauses {
        check_exc(sig, t)?;
        if !seen.insert(t) {
            return Err(TermError::BadBranches(format!("`{t}` appears twice")));
        }
    }
    if let Some(missing) = sig.exceptional().iter().find(|t| !seen.contains(t)) {
        return Err(TermError::BadBranches(format!("no branch for `{missing}`")));
    }
    Ok(())
}

/// Computes the arity of `t`.
pub fn typecheck(sig: &Signature, t: &Term) -> Result<Arity, TermError> {
    match t {
        Term::Id(x) => {
            check_ty(sig, x)?;
            Ok(Arity::new(x.clone(), x.clone()))
        }
        Term::Op(name) => {
            let op = sig.op(name).ok_or_else(|| TermError::UnknownOp(name.clone()))?;
            Ok(Arity::new(op.dom.clone(), op.cod.clone()))
        }
        Term::Compose(g, f) => {
            let af = typecheck(sig, f)?;
            let ag = typecheck(sig, g)?;
            if af.cod != ag.dom {
                return Err(mismatch("composition", &af.cod, &ag.dom));
            }
            Ok(Arity::new(af.dom, ag.cod))
        }
        Term::Empty(x) => {
            check_ty(sig, x)?;
            Ok(Arity::new(Ty::Zero, x.clone()))
        }
        Term::Tag(t) => {
            check_exc(sig, t)?;
            Ok(Arity::new(t.clone(), Ty::Zero))
        }
        Term::Untag(t) => {
            check_exc(sig, t)?;
            Ok(Arity::new(Ty::Zero, t.clone()))
        }
        Term::Downcast(k) => typecheck(sig, k),
        Term::Copair(g, k) => {
            let ag = typecheck(sig, g)?;
            let ak = typecheck(sig, k)?;
            if ak.dom != Ty::Zero {
                return Err(mismatch("copair exceptional part", &Ty::Zero, &ak.dom));
            }
            if ak.cod != ag.cod {
                return Err(mismatch("copair", &ag.cod, &ak.cod));
            }
            Ok(ag)
        }
        Term::TagCase { cod, branches } => {
            check_branch_cover(sig, branches)?;
            let mut result = cod.clone();
            if let Some(y) = &result {
                check_ty(sig, y)?;
            }
            for (t, f) in branches {
                let af = typecheck(sig, f)?;
                let expected = Ty::Named(t.clone());
                if af.dom != expected {
                    return Err(mismatch("tag-case branch", &expected, &af.dom));
                }
                match &result {
                    Some(y) if *y != af.cod => return Err(mismatch("tag-case branch", y, &af.cod)),
                    Some(_) => {}
                    None => result = Some(af.cod),
                }
            }
            let y = result.ok_or(TermError::CannotInferCodomain)?;
            Ok(Arity::new(Ty::Zero, y))
        }
        Term::Cast(r, t) => {
            check_exc(sig, r)?;
            check_exc(sig, t)?;
            if !sig.cast_exists(r, t).unwrap_or(false) {
                return Err(TermError::IllegalCast(r.clone(), t.clone()));
            }
            Ok(Arity::new(r.clone(), t.clone()))
        }
        Term::Throw(t, y) => {
            check_exc(sig, t)?;
            check_ty(sig, y)?;
            Ok(Arity::new(t.clone(), y.clone()))
        }
        Term::TryCatch { body, handlers } => {
            if handlers.is_empty() {
                return Err(TermError::EmptyHandlerList);
            }
            let ab = typecheck(sig, body)?;
            for (t, g) in handlers {
                check_exc(sig, t)?;
                let ag = typecheck(sig, g)?;
                let expected = Ty::Named(t.clone());
                if ag.dom != expected {
                    return Err(mismatch("handler", &expected, &ag.dom));
                }
                if ag.cod != ab.cod {
                    return Err(mismatch("handler", &ab.cod, &ag.cod));
                }
            }
            Ok(ab)
        }
    }
}

fn at_most_ppg(sig: &Signature, context: &'static str, t: &Term) -> Result<(), TermError> {
    let d = infer_decoration(sig, t)?;
    if d > Decoration::Propagator {
        return Err(TermError::HandlerNotPropagator { context, found: d });
    }
    Ok(())
}

/// The least decoration derivable for `t`.
///
/// Copair and tag-case are always catchers; `downcast` is always a
/// propagator, whatever its body.
pub fn infer_decoration(sig: &Signature, t: &Term) -> Result<Decoration, TermError> {
    use Decoration::*;
    Ok(match t {
        Term::Id(_) | Term::Empty(_) | Term::Cast(..) => Pure,
        Term::Op(name) => {
            sig.op(name)
                .ok_or_else(|| TermError::UnknownOp(name.clone()))?
                .decoration
        }
        Term::Tag(_) | Term::Throw(..) => Propagator,
        Term::Untag(_) => Catcher,
        Term::Compose(g, f) => infer_decoration(sig, g)?.join(infer_decoration(sig, f)?),
        Term::Downcast(k) => {
            infer_decoration(sig, k)?;
            Propagator
        }
        Term::Copair(g, k) => {
            at_most_ppg(sig, "copair ordinary part", g)?;
            infer_decoration(sig, k)?;
            Catcher
        }
        Term::TagCase { branches, .. } => {
            for (_, f) in branches {
                at_most_ppg(sig, "tag-case branch", f)?;
            }
            Catcher
        }
        Term::TryCatch { body, handlers } => {
            at_most_ppg(sig, "try body", body)?;
            for (_, g) in handlers {
                at_most_ppg(sig, "handler", g)?;
            }
            Propagator
        }
    })
}

/// Typecheck and infer in one pass.
pub fn check_term(sig: &Signature, t: &Term) -> Result<(Arity, Decoration), TermError> {
    let arity = typecheck(sig, t)?;
    let deco = infer_decoration(sig, t)?;
    Ok((arity, deco))
}

/// Verifies a user-asserted decoration: the inferred one must not exceed it.
pub fn check_asserted(sig: &Signature, t: &Term, asserted: Decoration) -> Result<Decoration, TermError> {
    let inferred = infer_decoration(sig, t)?;
    if inferred > asserted {
        return Err(TermError::DecorationExceeded { asserted, inferred });
    }
    Ok(inferred)
}
