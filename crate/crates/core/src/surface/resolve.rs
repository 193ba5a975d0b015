use std::collections::{BTreeMap, HashMap, HashSet};

use super::*;
use crate::kernel::{Equation, Judgment, Proof, RuleName};
use crate::semantics::Model;
use crate::signature::{Signature, SignatureDecl, TypeName};
use crate::term::{Arity, Decoration, Term, Ty};

#[derive(Clone, Debug)]
pub struct NamedTerm {
    pub name: String,
    /// With every reference to an earlier named term expanded.
    pub term: Term,
    pub arity: Option<Arity>,
    pub at: Span,
}

#[derive(Clone, Debug)]
pub struct NamedEquation {
    pub name: String,
    pub lemma: bool,
    pub equation: Equation,
    pub at: Span,
}

#[derive(Clone, Debug)]
pub struct NamedModel {
    pub name: String,
    pub model: Model,
    pub at: Span,
}

#[derive(Clone, Debug)]
pub struct NamedProof {
    pub name: String,
    pub proof: Proof,
    pub at: Span,
    /// Location of each step by label.
    pub steps: BTreeMap<String, Span>,
}

/// A resolved file. Every list is in declaration order.
#[derive(Clone, Debug)]
pub struct Document {
    pub signature: Signature,
    pub terms: Vec<NamedTerm>,
    pub equations: Vec<NamedEquation>,
    pub models: Vec<NamedModel>,
    pub proofs: Vec<NamedProof>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Document {
    pub fn equation(&self, name: &str) -> Option<&NamedEquation> {
        self.equations.iter().find(|e| e.name == name)
    }

    pub fn model(&self, name: &str) -> Option<&NamedModel> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn term(&self, name: &str) -> Option<&NamedTerm> {
        self.terms.iter().find(|t| t.name == name)
    }
}

fn unknown<T>(at: Span, msg: String) -> Result<T, SurfaceError> {
    Err(SurfaceError::UnknownIdentifier(Diagnostic::error(at, msg)))
}

fn invalid<T>(at: Span, msg: String) -> Result<T, SurfaceError> {
    Err(SurfaceError::Invalid(Diagnostic::error(at, msg)))
}

struct Scope<'a> {
    sig: &'a Signature,
    terms: HashMap<String, Term>,
}

impl Scope<'_> {
    fn ty_name(&self, t: &TypeName, at: Span) -> Result<(), SurfaceError> {
        if self.sig.is_type(t) {
            Ok(())
        } else {
            unknown(at, format!("unknown type `{t}`"))
        }
    }

    fn ty(&self, t: &Ty, at: Span) -> Result<(), SurfaceError> {
        match t {
            Ty::Zero => Ok(()),
            Ty::Named(n) => self.ty_name(n, at),
        }
    }

    fn term(&self, t: &Term, at: Span) -> Result<Term, SurfaceError> {
        let clauses = |cs: &[(TypeName, Term)]| {
            cs.iter()
                .map(|(n, body)| {
                    self.ty_name(n, at)?;
                    Ok((n.clone(), self.term(body, at)?))
                })
                .collect::<Result<Vec<_>, SurfaceError>>()
        };
        Ok(match t {
            Term::Id(x) | Term::Empty(x) => {
                self.ty(x, at)?;
                t.clone()
            }
            Term::Op(name) => {
                if self.sig.op(name).is_some() {
                    t.clone()
                } else if let Some(def) = self.terms.get(name) {
                    def.clone()
                } else {
                    return unknown(at, format!("unknown operation or term `{name}`"));
                }
            }
            Term::Compose(g, f) => Term::compose(self.term(g, at)?, self.term(f, at)?),
            Term::Tag(n) | Term::Untag(n) => {
                self.ty_name(n, at)?;
                t.clone()
            }
            Term::Cast(r, s) => {
                self.ty_name(r, at)?;
                self.ty_name(s, at)?;
                t.clone()
            }
            Term::Throw(n, y) => {
                self.ty_name(n, at)?;
                self.ty(y, at)?;
                t.clone()
            }
            Term::Downcast(k) => Term::downcast(self.term(k, at)?),
            Term::Copair(g, k) => Term::copair(self.term(g, at)?, self.term(k, at)?),
            Term::TagCase { cod, branches } => {
                if let Some(y) = cod {
                    self.ty(y, at)?;
                }
                Term::TagCase {
                    cod: cod.clone(),
                    branches: clauses(branches)?,
                }
            }
            Term::TryCatch { body, handlers } => Term::try_catch(self.term(body, at)?, clauses(handlers)?),
        })
    }

    fn judgment(&self, j: &Judgment, at: Span) -> Result<Judgment, SurfaceError> {
        Ok(match j {
            Judgment::IsType(x) | Judgment::IsExc(x) => {
                self.ty(x, at)?;
                j.clone()
            }
            Judgment::HasType(t, a) => {
                self.ty(&a.dom, at)?;
                self.ty(&a.cod, at)?;
                Judgment::HasType(self.term(t, at)?, a.clone())
            }
            Judgment::Deco(t, d) => Judgment::Deco(self.term(t, at)?, *d),
            Judgment::Eq(e) => Judgment::Eq(self.equation(e, at)?),
        })
    }

    fn equation(&self, e: &Equation, at: Span) -> Result<Equation, SurfaceError> {
        Ok(Equation {
            lhs: self.term(&e.lhs, at)?,
            rhs: self.term(&e.rhs, at)?,
            mode: e.mode,
        })
    }
}

fn signature(file: &SourceFile) -> Result<Signature, SurfaceError> {
    let mut decl = SignatureDecl::new();
    let mut types: HashSet<&str> = HashSet::new();
    let mut ops: HashSet<&str> = HashSet::new();
    let mut exceptional: HashSet<&str> = HashSet::new();
    let mut body_started = false;
    for item in &file.items {
        let Item::Sig(s) = &item.node else {
            body_started = true;
            continue;
        };
        let at = item.at;
        if body_started {
            return invalid(at, "signature declarations must come before terms, equations, models and proofs".into());
        }
        match s {
            SigItem::Type(t) | SigItem::Exception { name: t, .. } => {
                if !types.insert(t) || ops.contains(t.as_str()) {
                    return invalid(at, format!("`{t}` is declared twice"));
                }
                if let SigItem::Exception { extends, .. } = s {
                    decl = decl.exception(t);
                    exceptional.insert(t);
                    if let Some(sup) = extends {
                        if !types.contains(sup.as_str()) {
                            return unknown(at, format!("unknown type `{sup}`"));
                        }
                        if !exceptional.contains(sup.as_str()) {
                            return invalid(at, format!("`{sup}` is not an exceptional type"));
                        }
                        decl = decl.subtype(t, sup);
                    }
                } else {
                    decl = decl.ty(t);
                }
            }
            SigItem::Op {
                name,
                decoration,
                dom,
                cod,
            } => {
                if !ops.insert(name) || types.contains(name.as_str()) {
                    return invalid(at, format!("`{name}` is declared twice"));
                }
                for t in [dom, cod] {
                    if !types.contains(t.as_str()) {
                        return unknown(at, format!("unknown type `{t}`"));
                    }
                }
                decl = decl.op_decorated(name, dom, cod, decoration.unwrap_or(Decoration::Pure));
            }
            SigItem::Hierarchy => decl = decl.hierarchy(true),
        }
    }
    let first = file.items.first().map_or_else(Span::default, |i| i.at);
    decl.validate().or_else(|e| invalid(first, e.to_string()))
}

/// Encodes written model values against the carriers of a model.
struct Carriers<'a> {
    sig: &'a Signature,
    elements: Vec<Vec<String>>,
    offsets: Vec<usize>,
    exc_total: usize,
}

impl<'a> Carriers<'a> {
    fn new(sig: &'a Signature, elements: Vec<Vec<String>>) -> Self {
        let mut offsets = Vec::new();
        let mut exc_total = 0;
        for t in sig.exceptional() {
            offsets.push(exc_total);
            exc_total += elements[sig.type_index(t).unwrap()].len();
        }
        Carriers {
            sig,
            elements,
            offsets,
            exc_total,
        }
    }

    fn elem(&self, ty: usize, e: &str, at: Span) -> Result<usize, SurfaceError> {
        match self.elements[ty].iter().position(|x| x == e) {
            Some(i) => Ok(i),
            None => unknown(at, format!("`{e}` is not an element of `{}`", self.sig.types()[ty])),
        }
    }

    /// Code of `v` in `[X]` or, when `with_exc`, in `[X]+Exc`.
    fn code(&self, ty: usize, v: &ValueText, with_exc: bool, at: Span) -> Result<usize, SurfaceError> {
        match v {
            ValueText::Elem(e) => self.elem(ty, e, at),
            ValueText::Raise(t, e) => {
                if !with_exc {
                    return invalid(at, format!("`{v}` is not allowed here"));
                }
                let tn = TypeName::new(t);
                let Some(pos) = self.sig.exc_position(&tn) else {
                    return unknown(at, format!("`{t}` is not an exceptional type"));
                };
                let i = self.elem(self.sig.type_index(&tn).unwrap(), e, at)?;
                Ok(self.elements[ty].len() + self.offsets[pos] + i)
            }
        }
    }

    fn show(&self, ty: usize, code: usize) -> String {
        let n = self.elements[ty].len();
        if code < n {
            return self.elements[ty][code].clone();
        }
        let k = code - n;
        let pos = self.offsets.partition_point(|&o| o <= k) - 1;
        let t = &self.sig.exceptional()[pos];
        let ti = self.sig.type_index(t).unwrap();
        format!("raise {t} {}", self.elements[ti][k - self.offsets[pos]])
    }
}

fn model(sig: &Signature, def: &ModelDef, at: Span) -> Result<Model, SurfaceError> {
    let mut carriers: Vec<Option<Vec<String>>> = vec![None; sig.types().len()];
    for e in &def.entries {
        let ModelEntry::Assign { name, items } = &e.node else {
            continue;
        };
        let Some(ti) = sig.type_index(&TypeName::new(name)) else {
            if sig.op(name).is_none() {
                return unknown(e.at, format!("unknown type or operation `{name}`"));
            }
            continue;
        };
        let mut elems = Vec::new();
        for item in items {
            match item {
                EntryItem::Value(ValueText::Elem(x)) if !elems.contains(x) => elems.push(x.clone()),
                EntryItem::Value(ValueText::Elem(x)) => return invalid(e.at, format!("element `{x}` is listed twice")),
                _ => return invalid(e.at, format!("the carrier of `{name}` must list plain elements")),
            }
        }
        if carriers[ti].replace(elems).is_some() {
            return invalid(e.at, format!("second carrier for `{name}`"));
        }
    }
    let elements = carriers
        .into_iter()
        .zip(sig.types())
        .map(|(c, t)| c.map_or_else(|| invalid(at, format!("model `{}` has no carrier for `{t}`", def.name)), Ok))
        .collect::<Result<Vec<_>, _>>()?;
    let cs = Carriers::new(sig, elements);

    let mut tables: Vec<Option<Vec<usize>>> = vec![None; sig.ops().len()];
    let mut casts = BTreeMap::new();
    for e in &def.entries {
        match &e.node {
            ModelEntry::Assign { name, items } => {
                let Some(oi) = sig.op_index(name) else {
                    continue;
                };
                let op = &sig.ops()[oi];
                let (dom, cod) = (sig.type_index(&op.dom).unwrap(), sig.type_index(&op.cod).unwrap());
                let ctc = op.decoration == Decoration::Catcher;
                let len = cs.elements[dom].len() + if ctc { cs.exc_total } else { 0 };
                let mut table = vec![None; len];
                for item in items {
                    let EntryItem::Map(a, b) = item else {
                        return invalid(e.at, format!("the table of `{name}` must consist of `input -> output` entries"));
                    };
                    let i = cs.code(dom, a, ctc, e.at)?;
                    let o = cs.code(cod, b, op.decoration != Decoration::Pure, e.at)?;
                    if table[i].replace(o).is_some() {
                        return invalid(e.at, format!("`{name}` has two entries for `{a}`"));
                    }
                }
                if let Some(i) = table.iter().position(Option::is_none) {
                    return invalid(e.at, format!("`{name}` has no entry for `{}`", cs.show(dom, i)));
                }
                if tables[oi].replace(table.into_iter().flatten().collect()).is_some() {
                    return invalid(e.at, format!("second table for `{name}`"));
                }
            }
            ModelEntry::Cast { sub, sup, items } => {
                let pos = |t: &str| {
                    sig.exc_position(&TypeName::new(t))
                        .map_or_else(|| unknown(e.at, format!("`{t}` is not an exceptional type")), Ok)
                };
                let (r, t) = (pos(sub)?, pos(sup)?);
                if r == t || !sig.le_pos(r, t) {
                    return invalid(e.at, format!("`{sub}` is not a strict subtype of `{sup}`"));
                }
                let (ri, ti) = (sig.type_index(&TypeName::new(sub)).unwrap(), sig.type_index(&TypeName::new(sup)).unwrap());
                let mut table = vec![None; cs.elements[ri].len()];
                for (a, b) in items {
                    let i = cs.elem(ri, a, e.at)?;
                    if table[i].replace(cs.elem(ti, b, e.at)?).is_some() {
                        return invalid(e.at, format!("cast[{sub},{sup}] has two entries for `{a}`"));
                    }
                }
                if let Some(i) = table.iter().position(Option::is_none) {
                    return invalid(e.at, format!("cast[{sub},{sup}] has no entry for `{}`", cs.elements[ri][i]));
                }
                if casts.insert((r, t), table.into_iter().flatten().collect::<Vec<_>>()).is_some() {
                    return invalid(e.at, format!("second table for cast[{sub},{sup}]"));
                }
            }
        }
    }
    let tables = tables
        .into_iter()
        .zip(sig.ops())
        .map(|(t, op)| t.map_or_else(|| invalid(at, format!("model `{}` has no table for `{}`", def.name, op.name)), Ok))
        .collect::<Result<Vec<_>, _>>()?;
    Model::with_elements(sig, cs.elements, tables, casts).or_else(|e| invalid(at, format!("model `{}`: {e}", def.name)))
}

/// Notes for handlers that an earlier handler of the same type shadows.
fn shadowed_handlers(t: &Term, at: Span, out: &mut Vec<Diagnostic>) {
    if let Term::TryCatch { handlers, .. } = t {
        for (j, (tj, _)) in handlers.iter().enumerate() {
            if let Some(i) = handlers[..j].iter().position(|(ti, _)| ti == tj) {
                out.push(Diagnostic {
                    severity: Severity::Note,
                    at,
                    message: format!("handler {} for `{tj}` is never executed: handler {} catches `{tj}` first", j + 1, i + 1),
                });
            }
        }
    }
    for c in t.children() {
        shadowed_handlers(c, at, out);
    }
}

fn proof(scope: &Scope<'_>, def: &ProofDef, at: Span, diagnostics: &mut Vec<Diagnostic>) -> Result<NamedProof, SurfaceError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut nodes: Vec<Proof> = Vec::new();
    let mut used = vec![false; def.steps.len()];
    let mut spans = BTreeMap::new();
    for (i, step) in def.steps.iter().enumerate() {
        let rule: RuleName = match step.rule.parse() {
            Ok(r) => r,
            Err(_) => return unknown(step.at, format!("unknown rule `{}`", step.rule)),
        };
        let mut premises = Vec::new();
        for l in &step.premises {
            let Some(&j) = index.get(l.as_str()) else {
                return unknown(step.at, format!("step `{}` refers to `{l}`, which is not an earlier step", step.label));
            };
            used[j] = true;
            premises.push(nodes[j].clone());
        }
        let judgment = scope.judgment(&step.judgment, step.at)?;
        if index.insert(&step.label, i).is_some() {
            return invalid(step.at, format!("label `{}` is used twice", step.label));
        }
        spans.insert(step.label.clone(), step.at);
        nodes.push(Proof::new(rule, premises, judgment).labelled(&step.label));
    }
    let last = def.steps.len() - 1;
    for (i, step) in def.steps.iter().enumerate() {
        if i != last && !used[i] {
            diagnostics.push(Diagnostic::warning(
                step.at,
                format!("step `{}` of proof `{}` is not used", step.label, def.name),
            ));
        }
    }
    Ok(NamedProof {
        name: def.name.clone(),
        proof: nodes.pop().expect("proofs have at least one step"),
        at,
        steps: spans,
    })
}

/// Resolves names in declaration order and builds signature, models and
/// proof trees.
pub fn resolve(file: &SourceFile) -> Result<Document, SurfaceError> {
    let sig = signature(file)?;
    let mut scope = Scope {
        sig: &sig,
        terms: HashMap::new(),
    };
    let mut doc_terms = Vec::new();
    let mut equations: Vec<NamedEquation> = Vec::new();
    let mut models: Vec<NamedModel> = Vec::new();
    let mut proofs: Vec<NamedProof> = Vec::new();
    let mut diagnostics = Vec::new();
    for item in &file.items {
        let at = item.at;
        match &item.node {
            Item::Sig(_) => {}
            Item::Term(def) => {
                if scope.terms.contains_key(&def.name) || sig.op(&def.name).is_some() {
                    return invalid(at, format!("`{}` is already defined", def.name));
                }
                let arity = match &def.arity {
                    Some((x, y)) => {
                        scope.ty(x, at)?;
                        scope.ty(y, at)?;
                        Some(Arity::new(x.clone(), y.clone()))
                    }
                    None => None,
                };
                let term = scope.term(&def.term, at)?;
                shadowed_handlers(&term, at, &mut diagnostics);
                scope.terms.insert(def.name.clone(), term.clone());
                doc_terms.push(NamedTerm {
                    name: def.name.clone(),
                    term,
                    arity,
                    at,
                });
            }
            Item::Eq(def) => {
                if equations.iter().any(|e| e.name == def.name) {
                    return invalid(at, format!("equation `{}` is already defined", def.name));
                }
                let equation = scope.equation(&def.equation, at)?;
                shadowed_handlers(&equation.lhs, at, &mut diagnostics);
                shadowed_handlers(&equation.rhs, at, &mut diagnostics);
                equations.push(NamedEquation {
                    name: def.name.clone(),
                    lemma: def.lemma,
                    equation,
                    at,
                });
            }
            Item::Model(def) => {
                if models.iter().any(|m| m.name == def.name) {
                    return invalid(at, format!("model `{}` is already defined", def.name));
                }
                models.push(NamedModel {
                    name: def.name.clone(),
                    model: model(&sig, def, at)?,
                    at,
                });
            }
            Item::Proof(def) => {
                if proofs.iter().any(|p| p.name == def.name) {
                    return invalid(at, format!("proof `{}` is already defined", def.name));
                }
                proofs.push(proof(&scope, def, at, &mut diagnostics)?);
            }
        }
    }
    Ok(Document {
        signature: sig.clone(),
        terms: doc_terms,
        equations,
        models,
        proofs,
        diagnostics,
    })
}

/// Parses and resolves.
pub fn load(src: &str) -> Result<Document, SurfaceError> {
    resolve(&parse(src)?)
}

/// Resolves a free-standing term against a document.
pub fn resolve_term(doc: &Document, t: &Term) -> Result<Term, SurfaceError> {
    let scope = Scope {
        sig: &doc.signature,
        terms: doc.terms.iter().map(|t| (t.name.clone(), t.term.clone())).collect(),
    };
    scope.term(t, Span { line: 1, col: 1 })
}
