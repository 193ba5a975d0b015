use super::{check_term, typecheck, Clause, Term, TermError, Ty};
use crate::signature::Signature;

/// `recov_i` for the handler suffix starting at `clauses[0]`.
fn recov(clauses: &[Clause]) -> Term {
    let (t, g) = &clauses[0];
    let head = if clauses.len() == 1 {
        g.clone()
    } else {
        Term::copair(g.clone(), recov(&clauses[1..]))
    };
    Term::compose(head, Term::Untag(t.clone()))
}

fn expand_try(body: Term, handlers: &[Clause], cod: Ty) -> Term {
    let catch = Term::copair(Term::Id(cod), recov(handlers));
    Term::downcast(Term::compose(catch, body))
}

/// Expands the outermost node if it is a `throw` or `try`, leaving the
/// subterms untouched. Other terms are returned unchanged.
pub fn elaborate_head(sig: &Signature, t: &Term) -> Result<Term, TermError> {
    match t {
        Term::Throw(tn, y) => Ok(Term::compose(Term::Empty(y.clone()), Term::Tag(tn.clone()))),
        Term::TryCatch { body, handlers } => {
            let cod = typecheck(sig, t)?.cod;
            Ok(expand_try((**body).clone(), handlers, cod))
        }
        _ => Ok(t.clone()),
    }
}

fn elab(sig: &Signature, t: &Term) -> Result<Term, TermError> {
    let map_clauses = |cs: &[Clause]| -> Result<Vec<Clause>, TermError> {
        cs.iter().map(|(n, g)| Ok((n.clone(), elab(sig, g)?))).collect()
    };
    Ok(match t {
        Term::Id(_) | Term::Op(_) | Term::Empty(_) | Term::Tag(_) | Term::Untag(_) | Term::Cast(..) => t.clone(),
        Term::Compose(g, f) => Term::compose(elab(sig, g)?, elab(sig, f)?),
        Term::Downcast(k) => Term::downcast(elab(sig, k)?),
        Term::Copair(g, k) => Term::copair(elab(sig, g)?, elab(sig, k)?),
        Term::TagCase { cod, branches } => Term::TagCase {
            cod: cod.clone(),
            branches: map_clauses(branches)?,
        },
        Term::Throw(tn, y) => Term::compose(Term::Empty(y.clone()), Term::Tag(tn.clone())),
        Term::TryCatch { body, handlers } => {
            let cod = typecheck(sig, body)?.cod;
            expand_try(elab(sig, body)?, &map_clauses(handlers)?, cod)
        }
    })
}

/// Rewrites every `throw[T,Y]` to `empty[Y] o tag[T]` and every
/// `try(f) catch{T1 => g1, ..., Tn => gn}` to
/// `downcast([id[Y] | recov_1] o f)` with
/// `recov_n = gn o untag[Tn]` and `recov_i = [gi | recov_{i+1}] o untag[Ti]`.
pub fn elaborate(sig: &Signature, t: &Term) -> Result<Term, TermError> {
    check_term(sig, t)?;
    elab(sig, t)
}
