//! Random well-typed terms, equal-by-construction variants, and random
//! bindings for rule schemas.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::schema::{DecoPat, JudgmentPat, PremisePat, Schema, SideCondition, TermPat, TyPat};
use crate::kernel::{Bindings, Mode};
use crate::signature::{Signature, TypeName};
use crate::term::{check_term, elaborate_head, infer_decoration, typecheck, Arity, Clause, Decoration, Term, Ty};

pub const DEFAULT_DEPTH: usize = 4;

/// Generator calls allowed per top-level request.
const FUEL: usize = 400;

/// Seeded generator of terms over a signature.
pub struct TermGen<'a> {
    sig: &'a Signature,
    rng: ChaCha8Rng,
    pub depth: usize,
    fuel: usize,
}

#[derive(Clone, Copy)]
enum Shape {
    Id,
    Empty,
    Op(usize),
    Tag,
    Untag,
    Cast,
    Throw,
    Compose,
    Downcast,
    Copair,
    Case,
    Try,
}

fn is_leaf(s: Shape) -> bool {
    !matches!(
        s,
        Shape::Compose | Shape::Downcast | Shape::Copair | Shape::Case | Shape::Try
    )
}

impl<'a> TermGen<'a> {
    pub fn new(sig: &'a Signature, seed: u64) -> Self {
        TermGen {
            sig,
            rng: ChaCha8Rng::seed_from_u64(seed),
            depth: DEFAULT_DEPTH,
            fuel: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Declared types and `0`.
    pub fn all_types(&self) -> Vec<Ty> {
        let mut v: Vec<Ty> = self.sig.types().iter().cloned().map(Ty::Named).collect();
        v.push(Ty::Zero);
        v
    }

    pub fn random_type(&mut self) -> Ty {
        let v = self.all_types();
        v.choose(&mut self.rng).unwrap().clone()
    }

    pub fn random_exc(&mut self) -> Option<TypeName> {
        self.sig.exceptional().choose(&mut self.rng).cloned()
    }

    fn exc_of(&self, t: &Ty) -> Option<TypeName> {
        t.as_named().filter(|n| self.sig.is_exceptional(n)).cloned()
    }

    /// A random term of the given arity whose inferred decoration is at
    /// most `max`.
    pub fn term(&mut self, arity: &Arity, max: Decoration) -> Option<Term> {
        for _ in 0..8 {
            self.fuel = FUEL;
            let depth = self.rng.gen_range(0..=self.depth);
            if let Some(t) = self.gen(&arity.dom, &arity.cod, max, depth) {
                debug_assert!(infer_decoration(self.sig, &t).map_or(false, |d| d <= max));
                return Some(t);
            }
        }
        None
    }

    /// A random term of a random arity.
    pub fn any_term(&mut self, max: Decoration) -> Option<(Term, Arity)> {
        for _ in 0..16 {
            let a = Arity::new(self.random_type(), self.random_type());
            if let Some(t) = self.term(&a, max) {
                return Some((t, a));
            }
        }
        None
    }

    fn shapes(&self, dom: &Ty, cod: &Ty, max: Decoration, depth: usize) -> Vec<Shape> {
        use Decoration::*;
        let mut v = Vec::new();
        if dom == cod {
            v.push(Shape::Id);
        }
        if *dom == Ty::Zero {
            v.push(Shape::Empty);
        }
        for (i, op) in self.sig.ops().iter().enumerate() {
            if op.decoration <= max && Ty::Named(op.dom.clone()) == *dom && Ty::Named(op.cod.clone()) == *cod {
                v.push(Shape::Op(i));
            }
        }
        let dom_exc = self.exc_of(dom);
        let cod_exc = self.exc_of(cod);
        if max >= Propagator && *cod == Ty::Zero && dom_exc.is_some() {
            v.push(Shape::Tag);
        }
        if max >= Catcher && *dom == Ty::Zero && cod_exc.is_some() {
            v.push(Shape::Untag);
        }
        if let (Some(r), Some(t)) = (&dom_exc, &cod_exc) {
            if r != t && self.sig.cast_exists(r, t).unwrap_or(false) {
                v.push(Shape::Cast);
            }
        }
        if max >= Propagator && dom_exc.is_some() {
            v.push(Shape::Throw);
        }
        if depth > 0 {
            v.push(Shape::Compose);
            v.push(Shape::Compose);
            if max >= Propagator {
                v.push(Shape::Downcast);
                if !self.sig.exceptional().is_empty() {
                    v.push(Shape::Try);
                }
            }
            if max >= Catcher {
                v.push(Shape::Copair);
                if *dom == Ty::Zero {
                    v.push(Shape::Case);
                }
            }
        }
        v
    }

    fn gen(&mut self, dom: &Ty, cod: &Ty, max: Decoration, depth: usize) -> Option<Term> {
        if self.fuel == 0 {
            return None;
        }
        self.fuel -= 1;
        let mut shapes = self.shapes(dom, cod, max, depth);
        shapes.shuffle(&mut self.rng);
        // Leaves first now and then, so that terms stay varied in size.
        if self.rng.gen_bool(0.3) {
            shapes.sort_by_key(|s| !is_leaf(*s));
        }
        for s in shapes {
            if let Some(t) = self.build(s, dom, cod, max, depth) {
                return Some(t);
            }
        }
        None
    }

    fn build(&mut self, s: Shape, dom: &Ty, cod: &Ty, max: Decoration, depth: usize) -> Option<Term> {
        use Decoration::*;
        let d = depth.saturating_sub(1);
        Some(match s {
            Shape::Id => Term::Id(dom.clone()),
            Shape::Empty => Term::Empty(cod.clone()),
            Shape::Op(i) => Term::Op(self.sig.ops()[i].name.clone()),
            Shape::Tag => Term::Tag(self.exc_of(dom)?),
            Shape::Untag => Term::Untag(self.exc_of(cod)?),
            Shape::Cast => Term::Cast(self.exc_of(dom)?, self.exc_of(cod)?),
            Shape::Throw => Term::Throw(self.exc_of(dom)?, cod.clone()),
            Shape::Compose => {
                let mid = self.random_type();
                let f = self.gen(dom, &mid, max, d)?;
                let g = self.gen(&mid, cod, max, d)?;
                Term::compose(g, f)
            }
            Shape::Downcast => Term::downcast(self.gen(dom, cod, Catcher, d)?),
            Shape::Copair => {
                let g = self.gen(dom, cod, Propagator, d)?;
                let k = self.gen(&Ty::Zero, cod, Catcher, d)?;
                Term::copair(g, k)
            }
            Shape::Case => self.case_term(cod, d)?,
            Shape::Try => self.try_term(dom, cod, d)?,
        })
    }

    /// A tag-case `0 -> cod` with propagator branches.
    pub fn case_term(&mut self, cod: &Ty, depth: usize) -> Option<Term> {
        let mut branches: Vec<Clause> = Vec::new();
        for t in self.sig.exceptional().to_vec() {
            let f = self.gen(&Ty::Named(t.clone()), cod, Decoration::Propagator, depth)?;
            branches.push((t, f));
        }
        Some(Term::TagCase {
            cod: Some(cod.clone()),
            branches,
        })
    }

    /// A try-catch `dom -> cod` with one to three handlers.
    pub fn try_term(&mut self, dom: &Ty, cod: &Ty, depth: usize) -> Option<Term> {
        let body = self.gen(dom, cod, Decoration::Propagator, depth)?;
        let n = self.rng.gen_range(1..=3);
        let mut handlers = Vec::new();
        for _ in 0..n {
            let t = self.random_exc()?;
            let g = self.gen(&Ty::Named(t.clone()), cod, Decoration::Propagator, depth)?;
            handlers.push((t, g));
        }
        Some(Term::try_catch(body, handlers))
    }

    /// Top-level entry for tag-case and try metavariables.
    pub fn case_or_try(&mut self, arity: &Arity, try_: bool) -> Option<Term> {
        for _ in 0..8 {
            self.fuel = FUEL;
            let depth = self.rng.gen_range(0..self.depth);
            let t = if try_ {
                self.try_term(&arity.dom, &arity.cod, depth)
            } else {
                self.case_term(&arity.cod, depth)
            };
            if t.is_some() {
                return t;
            }
        }
        None
    }

    fn within(&self, t: Term, max: Decoration) -> Option<Term> {
        match check_term(self.sig, &t) {
            Ok((_, d)) if d <= max => Some(t),
            _ => None,
        }
    }

    /// A term strongly equal to `t` in every model, built from equations
    /// that hold by construction, of decoration at most `max`.
    pub fn strong_variant(&mut self, t: &Term, max: Decoration) -> Term {
        self.fuel = FUEL;
        for _ in 0..6 {
            if let Some(v) = self.try_strong(t, max) {
                return v;
            }
        }
        t.clone()
    }

    fn try_strong(&mut self, t: &Term, max: Decoration) -> Option<Term> {
        use Decoration::*;
        let (a, d) = check_term(self.sig, t).ok()?;
        let v = match self.rng.gen_range(0..8) {
            0 => Term::compose(Term::Id(a.cod.clone()), t.clone()),
            1 => Term::compose(t.clone(), Term::Id(a.dom.clone())),
            2 => match t {
                Term::Compose(h, gf) => match &**gf {
                    Term::Compose(g, f) => Term::compose(Term::compose((**h).clone(), (**g).clone()), (**f).clone()),
                    _ => return None,
                },
                _ => return None,
            },
            3 => match t {
                Term::Throw(..) | Term::TryCatch { .. } => elaborate_head(self.sig, t).ok()?,
                Term::Compose(hg, f) => match &**hg {
                    Term::Compose(h, g) => Term::compose((**h).clone(), Term::compose((**g).clone(), (**f).clone())),
                    _ => return None,
                },
                _ => return None,
            },
            4 if a.dom == Ty::Zero && d <= Propagator => {
                // every propagator out of 0 is the inclusion of Exc
                let bound = max.min(Propagator);
                let depth = self.rng.gen_range(0..=self.depth);
                self.gen(&Ty::Zero, &a.cod, bound, depth)?
            }
            5 if d <= Propagator => Term::downcast(t.clone()),
            6 | 7 => match t {
                Term::Compose(g, f) => {
                    if self.rng.gen_bool(0.5) {
                        Term::compose(self.try_strong(g, max)?, (**f).clone())
                    } else {
                        Term::compose((**g).clone(), self.try_strong(f, max)?)
                    }
                }
                Term::Copair(g, k) => {
                    if self.rng.gen_bool(0.5) {
                        Term::copair(self.try_strong(g, Propagator)?, (**k).clone())
                    } else {
                        Term::copair((**g).clone(), self.try_strong(k, max)?)
                    }
                }
                Term::Downcast(k) => Term::downcast(self.try_strong(k, Catcher)?),
                _ => return None,
            },
            _ => return None,
        };
        self.within(v, max)
    }

    /// A term weakly equal to `t` in every model.
    pub fn weak_variant(&mut self, t: &Term, max: Decoration) -> Term {
        self.fuel = FUEL;
        for _ in 0..6 {
            if let Some(v) = self.try_weak(t, max) {
                return v;
            }
        }
        t.clone()
    }

    fn try_weak(&mut self, t: &Term, max: Decoration) -> Option<Term> {
        use Decoration::*;
        let (a, d) = check_term(self.sig, t).ok()?;
        let v = match self.rng.gen_range(0..7) {
            0 => self.try_strong(t, max)?,
            1 => Term::downcast(t.clone()),
            2 if d <= Propagator => {
                let depth = self.rng.gen_range(0..self.depth);
                let k = self.gen(&Ty::Zero, &a.cod, Catcher, depth)?;
                Term::copair(t.clone(), k)
            }
            3 if a.dom == Ty::Zero => {
                let depth = self.rng.gen_range(0..=self.depth);
                self.gen(&Ty::Zero, &a.cod, max, depth)?
            }
            4 | 5 => match t {
                Term::Compose(g, f) => {
                    let f_pure = infer_decoration(self.sig, f).ok()? == Pure;
                    if f_pure && self.rng.gen_bool(0.5) {
                        Term::compose(self.try_weak(g, max)?, (**f).clone())
                    } else {
                        Term::compose((**g).clone(), self.try_weak(f, max)?)
                    }
                }
                Term::Copair(g, _) => {
                    let g2 = self.try_weak(g, Propagator)?;
                    let depth = self.rng.gen_range(0..self.depth);
                    let k = self.gen(&Ty::Zero, &a.cod, Catcher, depth)?;
                    Term::copair(g2, k)
                }
                Term::Downcast(k) => Term::downcast(self.try_weak(k, Catcher)?),
                _ => return None,
            },
            _ => return None,
        };
        self.within(v, max)
    }
}

// Binding generation for schemas. Type positions are unification variables;
// term metavariables get an arity from the schema's shape and typing
// premises, and are then drawn so that premise equations tend to hold.

#[derive(Default)]
struct Unifier {
    parent: Vec<usize>,
    value: Vec<Option<Ty>>,
    exc: Vec<bool>,
}

impl Unifier {
    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.value.push(None);
        self.exc.push(false);
        self.parent.len() - 1
    }

    fn known(&mut self, t: Ty) -> usize {
        let m = self.fresh();
        self.value[m] = Some(t);
        m
    }

    fn find(&mut self, a: usize) -> usize {
        let p = self.parent[a];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.parent[a] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) -> Result<(), ()> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(());
        }
        let value = match (self.value[a].take(), self.value[b].take()) {
            (Some(x), Some(y)) if x != y => return Err(()),
            (Some(x), _) | (_, Some(x)) => Some(x),
            _ => None,
        };
        self.parent[a] = b;
        self.value[b] = value;
        self.exc[b] |= self.exc[a];
        Ok(())
    }

    fn mark_exc(&mut self, a: usize) {
        let r = self.find(a);
        self.exc[r] = true;
    }
}

#[derive(Clone, Copy)]
enum VarKind {
    Plain,
    Case,
    Try,
}

struct Relation {
    a: &'static str,
    b: &'static str,
    mode: Mode,
}

#[derive(Default)]
struct Constraints {
    u: Unifier,
    type_vars: BTreeMap<&'static str, usize>,
    arities: BTreeMap<&'static str, (usize, usize)>,
    kinds: BTreeMap<&'static str, VarKind>,
    bounds: BTreeMap<&'static str, Decoration>,
    relations: Vec<Relation>,
}

/// Pairs of metavariables sitting at the same place in two otherwise
/// identical patterns.
fn context_pair(l: &TermPat, r: &TermPat) -> Option<(&'static str, &'static str)> {
    match (l, r) {
        (TermPat::Var(a), TermPat::Var(b)) if a != b => Some((a, b)),
        (TermPat::Compose(g1, f1), TermPat::Compose(g2, f2)) | (TermPat::Copair(g1, f1), TermPat::Copair(g2, f2)) => {
            match (g1 == g2, f1 == f2) {
                (true, false) => context_pair(f1, f2),
                (false, true) => context_pair(g1, g2),
                _ => None,
            }
        }
        (TermPat::Downcast(a), TermPat::Downcast(b)) => context_pair(a, b),
        _ => None,
    }
}

impl Constraints {
    fn ty(&mut self, p: &TyPat) -> usize {
        match p {
            TyPat::Zero => self.u.known(Ty::Zero),
            TyPat::Var(x) => {
                if let Some(&m) = self.type_vars.get(x) {
                    m
                } else {
                    let m = self.u.fresh();
                    self.type_vars.insert(x, m);
                    m
                }
            }
        }
    }

    fn exc(&mut self, p: &TyPat) -> usize {
        let m = self.ty(p);
        self.u.mark_exc(m);
        m
    }

    fn var(&mut self, x: &'static str, kind: VarKind) -> (usize, usize) {
        if let Some(&a) = self.arities.get(x) {
            return a;
        }
        let a = (self.u.fresh(), self.u.fresh());
        self.arities.insert(x, a);
        self.kinds.insert(x, kind);
        a
    }

    fn unify(&mut self, a: usize, b: usize) -> Result<(), ()> {
        self.u.union(a, b)
    }

    fn term(&mut self, p: &TermPat) -> Result<(usize, usize), ()> {
        Ok(match p {
            TermPat::Var(x) => self.var(x, VarKind::Plain),
            TermPat::Try(x) => self.var(x, VarKind::Try),
            TermPat::Case(x) => {
                let a = self.var(x, VarKind::Case);
                let z = self.u.known(Ty::Zero);
                self.unify(a.0, z)?;
                a
            }
            TermPat::Branch(f, e) => {
                let a = self.var(f, VarKind::Case);
                (self.exc(e), a.1)
            }
            TermPat::Id(x) => {
                let m = self.ty(x);
                (m, m)
            }
            TermPat::Empty(x) => (self.u.known(Ty::Zero), self.ty(x)),
            TermPat::Tag(x) => (self.exc(x), self.u.known(Ty::Zero)),
            TermPat::Untag(x) => (self.u.known(Ty::Zero), self.exc(x)),
            TermPat::Cast(x, y) => (self.exc(x), self.exc(y)),
            TermPat::Throw(x, y) => (self.exc(x), self.ty(y)),
            TermPat::Compose(g, f) => {
                let af = self.term(f)?;
                let ag = self.term(g)?;
                self.unify(af.1, ag.0)?;
                (af.0, ag.1)
            }
            TermPat::Downcast(k) => self.term(k)?,
            TermPat::Copair(g, k) => {
                let ag = self.term(g)?;
                let ak = self.term(k)?;
                let z = self.u.known(Ty::Zero);
                self.unify(ak.0, z)?;
                self.unify(ag.1, ak.1)?;
                ag
            }
        })
    }

    fn judgment(&mut self, j: &JudgmentPat, premise: bool) -> Result<(), ()> {
        match j {
            JudgmentPat::IsType(x) => {
                self.ty(x);
            }
            JudgmentPat::IsExc(x) => {
                self.exc(x);
            }
            JudgmentPat::HasType(t, x, y) => {
                let a = self.term(t)?;
                let (mx, my) = (self.ty(x), self.ty(y));
                self.unify(a.0, mx)?;
                self.unify(a.1, my)?;
            }
            JudgmentPat::Deco(t, d) => {
                self.term(t)?;
                if let (TermPat::Var(x), DecoPat::Is(d), true) = (t, d, premise) {
                    let b = self.bounds.entry(x).or_insert(Decoration::Catcher);
                    *b = (*b).min(*d);
                }
            }
            JudgmentPat::Eq(l, r, mode) => {
                let (al, ar) = (self.term(l)?, self.term(r)?);
                self.unify(al.0, ar.0)?;
                self.unify(al.1, ar.1)?;
                if premise {
                    if let Some((a, b)) = context_pair(l, r) {
                        let direct = matches!((l, r), (TermPat::Var(_), TermPat::Var(_)));
                        let mode = if direct { *mode } else { Mode::Strong };
                        self.relations.push(Relation { a, b, mode });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Draws bindings for the metavariables of `schema`. Returns `None` when the
/// draw fails (for example when no term of a required arity exists); the
/// caller retries with the same generator.
pub fn random_bindings(g: &mut TermGen<'_>, schema: &Schema) -> Option<Bindings> {
    let sig = g.sig;
    let mut c = Constraints::default();
    for p in &schema.premises {
        match p {
            PremisePat::One(j) => c.judgment(j, true).ok()?,
            PremisePat::PerException(x, js) => {
                for t in sig.exceptional() {
                    let saved = c.type_vars.remove(x);
                    let m = c.u.known(Ty::Named(t.clone()));
                    c.type_vars.insert(x, m);
                    for j in js {
                        c.judgment(j, true).ok()?;
                    }
                    c.type_vars.remove(x);
                    if let Some(s) = saved {
                        c.type_vars.insert(x, s);
                    }
                }
            }
        }
    }
    c.judgment(&schema.conclusion, false).ok()?;
    let mut derived: Vec<(&'static str, &'static str)> = Vec::new();
    for sc in &schema.side {
        match sc {
            SideCondition::Exceptional(x) | SideCondition::Subtype(x, _) | SideCondition::NotSubtype(x, _) => {
                c.exc(x);
                if let SideCondition::Subtype(_, y) | SideCondition::NotSubtype(_, y) = sc {
                    c.exc(y);
                }
            }
            SideCondition::Declared(x) => {
                c.ty(x);
            }
            SideCondition::HasArity(f, x, y) => {
                let a = c.var(f, VarKind::Plain);
                let (mx, my) = (c.ty(x), c.ty(y));
                c.unify(a.0, mx).ok()?;
                c.unify(a.1, my).ok()?;
            }
            SideCondition::WellFormed(f) | SideCondition::InferredAtMost(f, _) => {
                c.var(f, VarKind::Plain);
            }
            SideCondition::ElaboratesTo(l, r) => derived.push((l, r)),
            SideCondition::Distinct(..) | SideCondition::Hierarchy => {}
        }
    }

    // Resolve every type class.
    let resolve = |m: usize, g: &mut TermGen<'_>, c: &mut Constraints| -> Option<Ty> {
        let r = c.u.find(m);
        if c.u.value[r].is_none() {
            let t = if c.u.exc[r] {
                Ty::Named(g.random_exc()?)
            } else {
                g.random_type()
            };
            c.u.value[r] = Some(t);
        }
        let t = c.u.value[r].clone().unwrap();
        if c.u.exc[r] && g.exc_of(&t).is_none() {
            return None;
        }
        Some(t)
    };

    let mut b = Bindings::new();
    let tvars: Vec<(&'static str, usize)> = c.type_vars.iter().map(|(k, v)| (*k, *v)).collect();
    for (x, m) in tvars {
        let t = resolve(m, g, &mut c)?;
        b.types.insert(x.to_string(), t);
    }
    let mut arities: BTreeMap<&'static str, Arity> = BTreeMap::new();
    let avars: Vec<(&'static str, (usize, usize))> = c.arities.iter().map(|(k, v)| (*k, *v)).collect();
    for (x, (d, k)) in avars {
        let a = Arity::new(resolve(d, g, &mut c)?, resolve(k, g, &mut c)?);
        arities.insert(x, a);
    }

    let mut order = schema.term_vars();
    for x in c.arities.keys() {
        if !order.contains(x) {
            order.push(x);
        }
    }
    for x in order {
        if derived.iter().any(|(_, r)| *r == x) {
            continue;
        }
        let arity = arities.get(x)?;
        let bound = c.bounds.get(x).copied().unwrap_or(Decoration::Catcher);
        let t = match c.kinds.get(x).copied().unwrap_or(VarKind::Plain) {
            VarKind::Case => g.case_or_try(arity, false)?,
            VarKind::Try => g.case_or_try(arity, true)?,
            VarKind::Plain => {
                let related: Vec<(Term, Mode)> = c
                    .relations
                    .iter()
                    .filter_map(|r| {
                        let other = if r.b == x {
                            r.a
                        } else if r.a == x {
                            r.b
                        } else {
                            return None;
                        };
                        b.terms.get(other).map(|t| (t.clone(), r.mode))
                    })
                    .collect();
                let roll = g.rng.gen_range(0..10);
                if let (Some((base, _)), true) = (related.first(), roll < 8) {
                    let strong = related.iter().any(|(_, m)| *m == Mode::Strong);
                    let v = if strong && roll < 6 {
                        g.strong_variant(base, bound)
                    } else {
                        g.weak_variant(base, bound)
                    };
                    if typecheck(sig, &v).ok().as_ref() == Some(arity) {
                        v
                    } else {
                        g.term(arity, bound)?
                    }
                } else {
                    g.term(arity, bound)?
                }
            }
        };
        b.terms.insert(x.to_string(), t);
    }
    for (l, r) in derived {
        let lt = b.terms.get(l)?;
        let rt = elaborate_head(sig, lt).ok()?;
        b.terms.insert(r.to_string(), rt);
    }
    if let JudgmentPat::Deco(TermPat::Var(f), DecoPat::Var(d)) = &schema.conclusion {
        let inferred = infer_decoration(sig, b.terms.get(*f)?).ok()?;
        let pick = *Decoration::ALL.choose(&mut g.rng).unwrap();
        b.decorations.insert(d.to_string(), inferred.join(pick));
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{instantiate_premises, instantiate_rule, RuleName};
    use crate::semantics::{enumerate_models, eval_equation};
    use crate::signature::SignatureDecl;
    use crate::kernel::Equation;

    fn sig() -> Signature {
        SignatureDecl::new()
            .exception("T")
            .exception("R")
            .op("f", "T", "R")
            .validate()
            .unwrap()
    }

    #[test]
    fn generated_terms_respect_the_bound() {
        let s = sig();
        let mut g = TermGen::new(&s, 1);
        let mut made = 0;
        for i in 0..300 {
            let max = Decoration::ALL[i % 3];
            if let Some((t, a)) = g.any_term(max) {
                let (a2, d) = check_term(&s, &t).unwrap();
                assert_eq!(a, a2);
                assert!(d <= max, "{t} is {d}, bound {max}");
                made += 1;
            }
        }
        assert!(made > 250);
    }

    #[test]
    fn variants_are_equal_in_small_models() {
        let s = sig();
        let models: Vec<_> = enumerate_models(&s, 2, 100_000).collect();
        let mut g = TermGen::new(&s, 2);
        for _ in 0..100 {
            let Some((t, _)) = g.any_term(Decoration::Catcher) else { continue };
            let sv = g.strong_variant(&t, Decoration::Catcher);
            let wv = g.weak_variant(&t, Decoration::Catcher);
            for m in &models {
                assert!(eval_equation(&s, m, &Equation::strong(t.clone(), sv.clone())).unwrap(), "{t} vs {sv}");
                assert!(eval_equation(&s, m, &Equation::weak(t.clone(), wv.clone())).unwrap(), "{t} vs {wv}");
            }
        }
    }

    #[test]
    fn bindings_instantiate_for_every_rule() {
        let s = SignatureDecl::new()
            .exception("T")
            .exception("R")
            .op("f", "T", "R")
            .subtype("R", "T")
            .validate()
            .unwrap();
        let mut g = TermGen::new(&s, 3);
        for &r in RuleName::ALL {
            let schema = r.schema();
            let ok = (0..200)
                .filter_map(|_| random_bindings(&mut g, &schema))
                .filter(|b| instantiate_rule(&s, r, b).is_ok() && instantiate_premises(&s, r, b).is_ok())
                .count();
            assert!(ok > 20, "{r}: {ok} usable bindings");
        }
    }
}
