//! Decorated terms: the AST, arity checking, minimal decoration inference and
//! elaboration of `throw`/`try-catch` into core terms.

mod display;
mod elaborate;
mod typing;

use std::fmt;

pub use elaborate::{elaborate, elaborate_head};
pub use typing::{check_asserted, check_term, infer_decoration, typecheck, TermError};

use crate::signature::TypeName;

/// How a term interacts with exceptions. Ordered `Pure < Propagator < Catcher`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoration {
    Pure,
    Propagator,
    Catcher,
}

impl Decoration {
    pub const ALL: [Decoration; 3] = [Decoration::Pure, Decoration::Propagator, Decoration::Catcher];

    /// Short keyword used in the DSL.
    pub fn keyword(self) -> &'static str {
        match self {
            Decoration::Pure => "pure",
            Decoration::Propagator => "ppg",
            Decoration::Catcher => "ctc",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "pure" => Some(Decoration::Pure),
            "ppg" => Some(Decoration::Propagator),
            "ctc" => Some(Decoration::Catcher),
            _ => None,
        }
    }

    pub fn join(self, other: Self) -> Self {
        self.max(other)
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoration::Pure => "pure",
            Decoration::Propagator => "propagator",
            Decoration::Catcher => "catcher",
        })
    }
}

/// A type of the core signature: a declared type or the empty type `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Zero,
    Named(TypeName),
}

impl Ty {
    pub fn named(name: &str) -> Self {
        Ty::Named(TypeName::new(name))
    }

    pub fn as_named(&self) -> Option<&TypeName> {
        match self {
            Ty::Zero => None,
            Ty::Named(n) => Some(n),
        }
    }
}

impl From<TypeName> for Ty {
    fn from(n: TypeName) -> Self {
        Ty::Named(n)
    }
}

impl From<&str> for Ty {
    fn from(s: &str) -> Self {
        if s == "0" {
            Ty::Zero
        } else {
            Ty::named(s)
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Zero => f.write_str("0"),
            Ty::Named(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arity {
    pub dom: Ty,
    pub cod: Ty,
}

impl Arity {
    pub fn new(dom: impl Into<Ty>, cod: impl Into<Ty>) -> Self {
        Arity {
            dom: dom.into(),
            cod: cod.into(),
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.dom, self.cod)
    }
}

/// A handler clause `T => g` of a `try` or a branch of a tag-case.
pub type Clause = (TypeName, Term);

/// First-order terms of the exception language and its private core.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// `id[X]`
    Id(Ty),
    /// A basic operation of the signature.
    Op(String),
    /// `outer o inner`
    Compose(Box<Term>, Box<Term>),
    /// `empty[X] : 0 -> X`
    Empty(Ty),
    /// `tag[T] : T -> 0`
    Tag(TypeName),
    /// `untag[T] : 0 -> T`
    Untag(TypeName),
    /// `downcast(k)`: restriction of a catcher to ordinary arguments.
    Downcast(Box<Term>),
    /// `[g | k]` with `g : X -> Y` on ordinary arguments and `k : 0 -> Y` on exceptions.
    Copair(Box<Term>, Box<Term>),
    /// `case[Y]{T => f_T, ...}`: one branch per exceptional type. The
    /// codomain annotation is only needed when there are no branches.
    TagCase { cod: Option<Ty>, branches: Vec<Clause> },
    /// `cast[R,T]` for `R ⊑ T`.
    Cast(TypeName, TypeName),
    /// `throw[T,Y] : T -> Y`
    Throw(TypeName, Ty),
    /// `try(f) catch{T1 => g1, ...}`, handlers tried in order.
    TryCatch { body: Box<Term>, handlers: Vec<Clause> },
}

impl Term {
    pub fn id(x: impl Into<Ty>) -> Self {
        Term::Id(x.into())
    }

    pub fn op(name: &str) -> Self {
        Term::Op(name.to_string())
    }

    /// `outer o inner`
    pub fn compose(outer: Term, inner: Term) -> Self {
        Term::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn empty(x: impl Into<Ty>) -> Self {
        Term::Empty(x.into())
    }

    pub fn tag(t: &str) -> Self {
        Term::Tag(t.into())
    }

    pub fn untag(t: &str) -> Self {
        Term::Untag(t.into())
    }

    pub fn downcast(k: Term) -> Self {
        Term::Downcast(Box::new(k))
    }

    pub fn copair(g: Term, k: Term) -> Self {
        Term::Copair(Box::new(g), Box::new(k))
    }

    pub fn tag_case(branches: Vec<Clause>) -> Self {
        Term::TagCase { cod: None, branches }
    }

    pub fn cast(r: &str, t: &str) -> Self {
        Term::Cast(r.into(), t.into())
    }

    pub fn throw(t: &str, y: impl Into<Ty>) -> Self {
        Term::Throw(t.into(), y.into())
    }

    pub fn try_catch(body: Term, handlers: Vec<Clause>) -> Self {
        Term::TryCatch {
            body: Box::new(body),
            handlers,
        }
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Id(_)
            | Term::Op(_)
            | Term::Empty(_)
            | Term::Tag(_)
            | Term::Untag(_)
            | Term::Cast(..)
            | Term::Throw(..) => vec![],
            Term::Compose(g, f) => vec![g, f],
            Term::Downcast(k) => vec![k],
            Term::Copair(g, k) => vec![g, k],
            Term::TagCase { branches, .. } => branches.iter().map(|(_, t)| t).collect(),
            Term::TryCatch { body, handlers } => {
                let mut v = vec![&**body];
                v.extend(handlers.iter().map(|(_, t)| t));
                v
            }
        }
    }

    /// Whether the term contains `throw` or `try` nodes.
    pub fn is_core(&self) -> bool {
        match self {
            Term::Throw(..) | Term::TryCatch { .. } => false,
            _ => self.children().into_iter().all(Term::is_core),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    /// All subterms, preorder, including `self`.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        for c in self.children() {
            out.extend(c.subterms());
        }
        out
    }
}
