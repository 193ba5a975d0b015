//! Rule schemas as data: patterns over judgments with metavariables, the
//! matcher used by the checker, and instantiation from bindings.

use std::collections::BTreeMap;

use super::{Equation, Judgment, KernelError, Mode};
use crate::signature::Signature;
use crate::term::{check_term, elaborate_head, infer_decoration, typecheck, Arity, Decoration, Term, Ty};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyPat {
    Var(&'static str),
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermPat {
    Var(&'static str),
    /// A tag-case term bound as a whole.
    Case(&'static str),
    /// A try-catch term bound as a whole.
    Try(&'static str),
    /// The branch at a type of a bound tag-case.
    Branch(&'static str, TyPat),
    Id(TyPat),
    Empty(TyPat),
    Tag(TyPat),
    Untag(TyPat),
    Cast(TyPat, TyPat),
    Throw(TyPat, TyPat),
    Compose(Box<TermPat>, Box<TermPat>),
    Downcast(Box<TermPat>),
    Copair(Box<TermPat>, Box<TermPat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecoPat {
    Is(Decoration),
    Var(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JudgmentPat {
    IsType(TyPat),
    IsExc(TyPat),
    HasType(TermPat, TyPat, TyPat),
    Deco(TermPat, DecoPat),
    Eq(TermPat, TermPat, Mode),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PremisePat {
    One(JudgmentPat),
    /// The judgments repeated once per exceptional type, in declaration
    /// order, with the named type variable bound to that type.
    PerException(&'static str, Vec<JudgmentPat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SideCondition {
    /// The term is well formed (typechecks and has a decoration).
    WellFormed(&'static str),
    /// The type is declared in the signature or is `0`.
    Declared(TyPat),
    Exceptional(TyPat),
    Distinct(TyPat, TyPat),
    Subtype(TyPat, TyPat),
    NotSubtype(TyPat, TyPat),
    /// The signature uses hierarchy-aware untagging.
    Hierarchy,
    /// Kernel typecheck of a term against an arity.
    HasArity(&'static str, TyPat, TyPat),
    /// Kernel decoration inference: inferred is at most the given one.
    InferredAtMost(&'static str, DecoPat),
    /// The second term is the one-step expansion of the first.
    ElaboratesTo(&'static str, &'static str),
}

/// Premise patterns, conclusion pattern and side conditions of one rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub premises: Vec<PremisePat>,
    pub conclusion: JudgmentPat,
    pub side: Vec<SideCondition>,
}

/// Assignment of schema metavariables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub types: BTreeMap<String, Ty>,
    pub terms: BTreeMap<String, Term>,
    pub decorations: BTreeMap<String, Decoration>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ty(mut self, name: &str, t: impl Into<Ty>) -> Self {
        self.types.insert(name.to_string(), t.into());
        self
    }

    pub fn term(mut self, name: &str, t: Term) -> Self {
        self.terms.insert(name.to_string(), t);
        self
    }

    pub fn deco(mut self, name: &str, d: Decoration) -> Self {
        self.decorations.insert(name.to_string(), d);
        self
    }
}

pub fn tv(x: &'static str) -> TyPat {
    TyPat::Var(x)
}

pub fn mv(x: &'static str) -> TermPat {
    TermPat::Var(x)
}

pub fn comp(g: TermPat, f: TermPat) -> TermPat {
    TermPat::Compose(Box::new(g), Box::new(f))
}

pub fn is_type(x: TyPat) -> JudgmentPat {
    JudgmentPat::IsType(x)
}

pub fn is_exc(x: TyPat) -> JudgmentPat {
    JudgmentPat::IsExc(x)
}

pub fn has_type(t: TermPat, a: TyPat, b: TyPat) -> JudgmentPat {
    JudgmentPat::HasType(t, a, b)
}

pub fn deco(t: TermPat, d: Decoration) -> JudgmentPat {
    JudgmentPat::Deco(t, DecoPat::Is(d))
}

pub fn strong(a: TermPat, b: TermPat) -> JudgmentPat {
    JudgmentPat::Eq(a, b, Mode::Strong)
}

pub fn weak(a: TermPat, b: TermPat) -> JudgmentPat {
    JudgmentPat::Eq(a, b, Mode::Weak)
}

fn schema_err(msg: impl Into<String>) -> KernelError {
    KernelError::SchemaMismatch(msg.into())
}

fn bind<T: Clone + PartialEq + std::fmt::Display>(
    map: &mut BTreeMap<String, T>,
    name: &str,
    value: &T,
) -> Result<(), KernelError> {
    match map.get(name) {
        Some(existing) if existing != value => Err(schema_err(format!(
            "metavariable {name} is both `{existing}` and `{value}`"
        ))),
        Some(_) => Ok(()),
        None => {
            map.insert(name.to_string(), value.clone());
            Ok(())
        }
    }
}

impl TyPat {
    pub(crate) fn matches(&self, ty: &Ty, b: &mut Bindings) -> Result<(), KernelError> {
        match self {
            TyPat::Zero if *ty == Ty::Zero => Ok(()),
            TyPat::Zero => Err(schema_err(format!("expected type 0, found `{ty}`"))),
            TyPat::Var(x) => bind(&mut b.types, x, ty),
        }
    }

    pub(crate) fn instantiate(&self, b: &Bindings) -> Result<Ty, KernelError> {
        match self {
            TyPat::Zero => Ok(Ty::Zero),
            TyPat::Var(x) => b
                .types
                .get(*x)
                .cloned()
                .ok_or_else(|| KernelError::MissingBinding(x.to_string())),
        }
    }

    fn named(&self, b: &Bindings) -> Result<crate::signature::TypeName, KernelError> {
        match self.instantiate(b)? {
            Ty::Named(n) => Ok(n),
            Ty::Zero => Err(schema_err("expected a named type, found 0")),
        }
    }
}

fn branch_of(case: &Term, at: &Ty) -> Result<Term, KernelError> {
    let Term::TagCase { branches, .. } = case else {
        return Err(schema_err(format!("`{case}` is not a tag-case")));
    };
    branches
        .iter()
        .find(|(t, _)| Ty::Named(t.clone()) == *at)
        .map(|(_, f)| f.clone())
        .ok_or_else(|| schema_err(format!("tag-case `{case}` has no branch at `{at}`")))
}

impl TermPat {
    pub(crate) fn matches(&self, term: &Term, b: &mut Bindings) -> Result<(), KernelError> {
        let shape = || schema_err(format!("`{term}` does not have the shape the rule requires"));
        match (self, term) {
            (TermPat::Var(x), _) => bind(&mut b.terms, x, term),
            (TermPat::Case(x), Term::TagCase { .. }) => bind(&mut b.terms, x, term),
            (TermPat::Try(x), Term::TryCatch { .. }) => bind(&mut b.terms, x, term),
            (TermPat::Branch(..), _) => {
                let expected = self.instantiate(b)?;
                if expected == *term {
                    Ok(())
                } else {
                    Err(schema_err(format!("expected branch `{expected}`, found `{term}`")))
                }
            }
            (TermPat::Id(x), Term::Id(y)) | (TermPat::Empty(x), Term::Empty(y)) => x.matches(y, b),
            (TermPat::Tag(x), Term::Tag(n)) | (TermPat::Untag(x), Term::Untag(n)) => {
                x.matches(&Ty::Named(n.clone()), b)
            }
            (TermPat::Cast(x, y), Term::Cast(r, t)) => {
                x.matches(&Ty::Named(r.clone()), b)?;
                y.matches(&Ty::Named(t.clone()), b)
            }
            (TermPat::Throw(x, y), Term::Throw(t, z)) => {
                x.matches(&Ty::Named(t.clone()), b)?;
                y.matches(z, b)
            }
            (TermPat::Compose(pg, pf), Term::Compose(g, f)) | (TermPat::Copair(pg, pf), Term::Copair(g, f)) => {
                pg.matches(g, b)?;
                pf.matches(f, b)
            }
            (TermPat::Downcast(pk), Term::Downcast(k)) => pk.matches(k, b),
            _ => Err(shape()),
        }
    }

    pub(crate) fn instantiate(&self, b: &Bindings) -> Result<Term, KernelError> {
        let missing = |x: &str| KernelError::MissingBinding(x.to_string());
        Ok(match self {
            TermPat::Var(x) | TermPat::Case(x) | TermPat::Try(x) => {
                b.terms.get(*x).cloned().ok_or_else(|| missing(x))?
            }
            TermPat::Branch(f, at) => {
                let case = b.terms.get(*f).ok_or_else(|| missing(f))?;
                branch_of(case, &at.instantiate(b)?)?
            }
            TermPat::Id(x) => Term::Id(x.instantiate(b)?),
            TermPat::Empty(x) => Term::Empty(x.instantiate(b)?),
            TermPat::Tag(x) => Term::Tag(x.named(b)?),
            TermPat::Untag(x) => Term::Untag(x.named(b)?),
            TermPat::Cast(x, y) => Term::Cast(x.named(b)?, y.named(b)?),
            TermPat::Throw(x, y) => Term::Throw(x.named(b)?, y.instantiate(b)?),
            TermPat::Compose(g, f) => Term::compose(g.instantiate(b)?, f.instantiate(b)?),
            TermPat::Copair(g, k) => Term::copair(g.instantiate(b)?, k.instantiate(b)?),
            TermPat::Downcast(k) => Term::downcast(k.instantiate(b)?),
        })
    }

    /// Metavariables naming whole terms, in order of first occurrence.
    pub fn term_vars(&self, out: &mut Vec<&'static str>) {
        match self {
            TermPat::Var(x) | TermPat::Case(x) | TermPat::Try(x) | TermPat::Branch(x, _) => {
                if !out.contains(x) {
                    out.push(x)
                }
            }
            TermPat::Compose(g, f) | TermPat::Copair(g, f) => {
                g.term_vars(out);
                f.term_vars(out);
            }
            TermPat::Downcast(k) => k.term_vars(out),
            _ => {}
        }
    }
}

impl JudgmentPat {
    pub(crate) fn matches(&self, j: &Judgment, b: &mut Bindings) -> Result<(), KernelError> {
        match (self, j) {
            (JudgmentPat::IsType(p), Judgment::IsType(t)) | (JudgmentPat::IsExc(p), Judgment::IsExc(t)) => {
                p.matches(t, b)
            }
            (JudgmentPat::HasType(pt, pa, pb), Judgment::HasType(t, a)) => {
                pt.matches(t, b)?;
                pa.matches(&a.dom, b)?;
                pb.matches(&a.cod, b)
            }
            (JudgmentPat::Deco(pt, pd), Judgment::Deco(t, d)) => {
                pt.matches(t, b)?;
                match pd {
                    DecoPat::Is(want) if want == d => Ok(()),
                    DecoPat::Is(want) => Err(KernelError::DecorationViolation(format!(
                        "rule needs `{t}` to be {want}, premise states {d}"
                    ))),
                    DecoPat::Var(x) => bind(&mut b.decorations, x, d),
                }
            }
            (JudgmentPat::Eq(pl, pr, pm), Judgment::Eq(e)) => {
                if *pm != e.mode {
                    return Err(schema_err(format!("expected a {pm} equation, found a {} one", e.mode)));
                }
                pl.matches(&e.lhs, b)?;
                pr.matches(&e.rhs, b)
            }
            _ => Err(schema_err(format!("judgment `{j}` has the wrong form"))),
        }
    }

    pub fn instantiate(&self, b: &Bindings) -> Result<Judgment, KernelError> {
        Ok(match self {
            JudgmentPat::IsType(p) => Judgment::IsType(p.instantiate(b)?),
            JudgmentPat::IsExc(p) => Judgment::IsExc(p.instantiate(b)?),
            JudgmentPat::HasType(t, x, y) => {
                Judgment::HasType(t.instantiate(b)?, Arity::new(x.instantiate(b)?, y.instantiate(b)?))
            }
            JudgmentPat::Deco(t, d) => {
                let d = match d {
                    DecoPat::Is(d) => *d,
                    DecoPat::Var(x) => *b
                        .decorations
                        .get(*x)
                        .ok_or_else(|| KernelError::MissingBinding(x.to_string()))?,
                };
                Judgment::Deco(t.instantiate(b)?, d)
            }
            JudgmentPat::Eq(l, r, mode) => Judgment::Eq(Equation {
                lhs: l.instantiate(b)?,
                rhs: r.instantiate(b)?,
                mode: *mode,
            }),
        })
    }

    pub fn term_vars(&self, out: &mut Vec<&'static str>) {
        match self {
            JudgmentPat::IsType(_) | JudgmentPat::IsExc(_) => {}
            JudgmentPat::HasType(t, ..) | JudgmentPat::Deco(t, _) => t.term_vars(out),
            JudgmentPat::Eq(l, r, _) => {
                l.term_vars(out);
                r.term_vars(out);
            }
        }
    }
}

/// A premise pattern after per-exception expansion.
#[derive(Clone, Debug)]
pub struct FlatPremise {
    pub pattern: JudgmentPat,
    /// Loop variable and the exceptional type it stands for.
    pub scope: Option<(&'static str, Ty)>,
}

impl FlatPremise {
    /// Runs `f` with the loop variable bound, restoring any outer binding.
    pub fn scoped<R>(&self, b: &mut Bindings, f: impl FnOnce(&JudgmentPat, &mut Bindings) -> R) -> R {
        match &self.scope {
            None => f(&self.pattern, b),
            Some((x, ty)) => {
                let saved = b.types.insert(x.to_string(), ty.clone());
                let r = f(&self.pattern, b);
                match saved {
                    Some(s) => b.types.insert(x.to_string(), s),
                    None => b.types.remove(*x),
                };
                r
            }
        }
    }
}

impl Schema {
    pub fn flat_premises(&self, sig: &Signature) -> Vec<FlatPremise> {
        let mut out = Vec::new();
        for p in &self.premises {
            match p {
                PremisePat::One(j) => out.push(FlatPremise {
                    pattern: j.clone(),
                    scope: None,
                }),
                PremisePat::PerException(x, js) => {
                    for t in sig.exceptional() {
                        for j in js {
                            out.push(FlatPremise {
                                pattern: j.clone(),
                                scope: Some((x, Ty::Named(t.clone()))),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Matches a conclusion and its premise conclusions, returning the bindings.
    pub fn match_instance(
        &self,
        sig: &Signature,
        conclusion: &Judgment,
        premises: &[&Judgment],
    ) -> Result<Bindings, KernelError> {
        let flat = self.flat_premises(sig);
        if flat.len() != premises.len() {
            return Err(schema_err(format!(
                "rule takes {} premises, {} given",
                flat.len(),
                premises.len()
            )));
        }
        let mut b = Bindings::new();
        self.conclusion.matches(conclusion, &mut b)?;
        for (i, (fp, actual)) in flat.iter().zip(premises).enumerate() {
            fp.scoped(&mut b, |pat, b| pat.matches(actual, b)).map_err(|e| match e {
                KernelError::SchemaMismatch(m) => schema_err(format!("premise {}: {m}", i + 1)),
                KernelError::DecorationViolation(m) => {
                    KernelError::DecorationViolation(format!("premise {}: {m}", i + 1))
                }
                other => other,
            })?;
        }
        self.check_side(sig, &b)?;
        Ok(b)
    }

    pub fn check_side(&self, sig: &Signature, b: &Bindings) -> Result<(), KernelError> {
        for sc in &self.side {
            check_side_condition(sig, sc, b)?;
        }
        Ok(())
    }

    pub fn instantiate_premises(&self, sig: &Signature, b: &Bindings) -> Result<Vec<Judgment>, KernelError> {
        let mut b = b.clone();
        self.flat_premises(sig)
            .iter()
            .map(|fp| fp.scoped(&mut b, |pat, b| pat.instantiate(b)))
            .collect()
    }

    /// Every term metavariable, in order of first occurrence (premises first).
    pub fn term_vars(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for p in &self.premises {
            match p {
                PremisePat::One(j) => j.term_vars(&mut out),
                PremisePat::PerException(_, js) => js.iter().for_each(|j| j.term_vars(&mut out)),
            }
        }
        self.conclusion.term_vars(&mut out);
        out
    }
}

fn violated(msg: String) -> KernelError {
    KernelError::SideConditionViolated(msg)
}

fn term_of<'a>(b: &'a Bindings, x: &str) -> Result<&'a Term, KernelError> {
    b.terms
        .get(x)
        .ok_or_else(|| KernelError::MissingBinding(x.to_string()))
}

fn exc_pos(sig: &Signature, t: &Ty) -> Result<usize, KernelError> {
    t.as_named()
        .and_then(|n| sig.exc_position(n))
        .ok_or_else(|| violated(format!("`{t}` is not an exceptional type")))
}

fn check_side_condition(sig: &Signature, sc: &SideCondition, b: &Bindings) -> Result<(), KernelError> {
    match sc {
        SideCondition::WellFormed(x) => {
            check_term(sig, term_of(b, x)?)?;
        }
        SideCondition::Declared(p) => {
            let t = p.instantiate(b)?;
            if let Ty::Named(n) = &t {
                if !sig.is_type(n) {
                    return Err(violated(format!("`{t}` is not a declared type")));
                }
            }
        }
        SideCondition::Exceptional(p) => {
            exc_pos(sig, &p.instantiate(b)?)?;
        }
        SideCondition::Distinct(p, q) => {
            let (r, t) = (p.instantiate(b)?, q.instantiate(b)?);
            if r == t {
                return Err(violated(format!("`{r}` and `{t}` must differ")));
            }
        }
        SideCondition::Subtype(p, q) | SideCondition::NotSubtype(p, q) => {
            let (r, t) = (p.instantiate(b)?, q.instantiate(b)?);
            let le = sig.le_pos(exc_pos(sig, &r)?, exc_pos(sig, &t)?);
            let want = matches!(sc, SideCondition::Subtype(..));
            if le != want {
                let rel = if want { "⊑" } else { "⋢" };
                return Err(violated(format!("needs `{r}` {rel} `{t}`")));
            }
        }
        SideCondition::Hierarchy => {
            if !sig.hierarchy() {
                return Err(violated("rule needs a signature with a subtyping hierarchy".into()));
            }
        }
        SideCondition::HasArity(x, p, q) => {
            let t = term_of(b, x)?;
            let want = Arity::new(p.instantiate(b)?, q.instantiate(b)?);
            let got = typecheck(sig, t)?;
            if got != want {
                return Err(KernelError::ArityMismatch(format!(
                    "`{t}` has arity {got}, not {want}"
                )));
            }
        }
        SideCondition::InferredAtMost(x, d) => {
            let t = term_of(b, x)?;
            let bound = match d {
                DecoPat::Is(d) => *d,
                DecoPat::Var(v) => *b
                    .decorations
                    .get(*v)
                    .ok_or_else(|| KernelError::MissingBinding(v.to_string()))?,
            };
            let inferred = infer_decoration(sig, t)?;
            if inferred > bound {
                return Err(KernelError::DecorationViolation(format!(
                    "`{t}` is a {inferred}, not a {bound}"
                )));
            }
        }
        SideCondition::ElaboratesTo(l, r) => {
            let (l, r) = (term_of(b, l)?, term_of(b, r)?);
            let expanded = elaborate_head(sig, l)?;
            if expanded != *r {
                return Err(violated(format!("`{r}` is not the expansion of `{l}`")));
            }
        }
    }
    Ok(())
}
