//! Finite-model interpretation of terms.
//!
//! Every type is a finite carrier; `0` is empty. `Exc` is the disjoint union
//! of the carriers of the exceptional types, laid out in declaration order.
//! A term `X -> Y` denotes a total table from `[X]+Exc` to `[Y]+Exc`, whose
//! inputs and outputs are encoded as integers: `0..|X|` are ordinary values
//! and `|X| + e` is the `e`-th exception.

pub mod enumerate;
pub mod generate;
pub mod soundness;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::{Equation, Judgment, Mode};
use crate::signature::{Signature, TypeName};
use crate::term::{elaborate, elaborate_head, typecheck, Decoration, Term, TermError, Ty};

pub use enumerate::{enumerate_models, enumerate_models_seeded, ModelStream, DEFAULT_SEED};
pub use generate::{TermGen, DEFAULT_DEPTH};
pub use soundness::{
    corrupted_weak_substitution, soundness_check, soundness_check_schema, soundness_check_with, Counterexample,
    SoundnessConfig, SoundnessReport,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// An element of `Exc`: its type of origin, as a position among the
/// exceptional types, and the element of that carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcValue {
    pub ty: usize,
    pub value: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffValue {
    Ordinary(usize),
    Exceptional(ExcValue),
}

/// The stored table of an operation. Its shape follows the declared
/// decoration: a pure table maps `[X]` to `[Y]`, a propagator table maps
/// `[X]` to codes of `[Y]+Exc`, a catcher table maps codes of `[X]+Exc` to
/// codes of `[Y]+Exc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTable {
    pub name: String,
    pub decoration: Decoration,
    pub dom: usize,
    pub cod: usize,
    pub table: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    types: Vec<TypeName>,
    elements: Vec<Vec<String>>,
    /// Type index of each exceptional position.
    exc_types: Vec<usize>,
    exc_offsets: Vec<usize>,
    exc_total: usize,
    ops: Vec<OpTable>,
    /// `cast[R,T]` for every strict pair `R ⊑ T`, keyed by exceptional positions.
    casts: BTreeMap<(usize, usize), Vec<usize>>,
}

fn invalid(msg: impl Into<String>) -> SemanticsError {
    SemanticsError::InvalidModel(msg.into())
}

/// Default element names: the type name in lower case followed by an index.
pub fn default_elements(ty: &TypeName, n: usize) -> Vec<String> {
    let stem = ty.as_str().to_lowercase();
    (0..n).map(|i| format!("{stem}{i}")).collect()
}

/// Strict subtype pairs of a signature, as exceptional positions.
pub fn strict_cast_pairs(sig: &Signature) -> Vec<(usize, usize)> {
    let k = sig.exceptional().len();
    let mut out = Vec::new();
    for r in 0..k {
        for t in 0..k {
            if r != t && sig.le_pos(r, t) {
                out.push((r, t));
            }
        }
    }
    out
}

impl Model {
    /// A model with default element names, given the carrier size of every
    /// type (in signature order), the raw table of every operation (in
    /// signature order) and the strict casts.
    pub fn new(
        sig: &Signature,
        sizes: &[usize],
        ops: Vec<Vec<usize>>,
        casts: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self, SemanticsError> {
        if sizes.len() != sig.types().len() {
            return Err(invalid(format!(
                "{} carrier sizes for {} types",
                sizes.len(),
                sig.types().len()
            )));
        }
        let elements = sig
            .types()
            .iter()
            .zip(sizes)
            .map(|(t, &n)| default_elements(t, n))
            .collect();
        Self::with_elements(sig, elements, ops, casts)
    }

    pub fn with_elements(
        sig: &Signature,
        elements: Vec<Vec<String>>,
        ops: Vec<Vec<usize>>,
        casts: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self, SemanticsError> {
        if elements.len() != sig.types().len() {
            return Err(invalid("one carrier per declared type is required"));
        }
        if ops.len() != sig.ops().len() {
            return Err(invalid(format!(
                "{} tables for {} operations",
                ops.len(),
                sig.ops().len()
            )));
        }
        let exc_types: Vec<usize> = sig
            .exceptional()
            .iter()
            .map(|t| sig.type_index(t).expect("exceptional types are declared"))
            .collect();
        let mut exc_offsets = Vec::with_capacity(exc_types.len());
        let mut exc_total = 0;
        for &i in &exc_types {
            exc_offsets.push(exc_total);
            exc_total += elements[i].len();
        }
        let mut model = Model {
            types: sig.types().to_vec(),
            elements,
            exc_types,
            exc_offsets,
            exc_total,
            ops: Vec::new(),
            casts: BTreeMap::new(),
        };
        for (decl, table) in sig.ops().iter().zip(ops) {
            let op = OpTable {
                name: decl.name.clone(),
                decoration: decl.decoration,
                dom: sig.type_index(&decl.dom).expect("validated"),
                cod: sig.type_index(&decl.cod).expect("validated"),
                table,
            };
            model.check_op(&op)?;
            model.ops.push(op);
        }
        let pairs = strict_cast_pairs(sig);
        let exc_name = |p: usize| sig.exceptional().get(p).map_or_else(|| format!("#{p}"), |t| t.to_string());
        if let Some(&(r, t)) = casts.keys().find(|k| !pairs.contains(k)) {
            return Err(invalid(format!(
                "cast[{},{}] is not between a strict subtype pair",
                exc_name(r),
                exc_name(t)
            )));
        }
        for &(r, t) in &pairs {
            let (rn, tn) = (&sig.exceptional()[r], &sig.exceptional()[t]);
            let table = casts
                .get(&(r, t))
                .ok_or_else(|| invalid(format!("missing table for cast[{rn},{tn}]")))?;
            let (nr, nt) = (model.exc_size(r), model.exc_size(t));
            if table.len() != nr || table.iter().any(|&v| v >= nt) {
                return Err(invalid(format!("cast[{rn},{tn}] is not a function [{rn}] -> [{tn}]")));
            }
        }
        model.casts = casts;
        if let Some((s, r, t)) = model.incoherent_triple(sig) {
            let e = sig.exceptional();
            return Err(invalid(format!(
                "cast[{},{}] differs from cast[{},{}] o cast[{},{}]",
                e[s], e[t], e[r], e[t], e[s], e[r]
            )));
        }
        Ok(model)
    }

    fn check_op(&self, op: &OpTable) -> Result<(), SemanticsError> {
        let (nd, nc, e) = (self.elements[op.dom].len(), self.elements[op.cod].len(), self.exc_total);
        let (len, bound) = match op.decoration {
            Decoration::Pure => (nd, nc),
            Decoration::Propagator => (nd, nc + e),
            Decoration::Catcher => (nd + e, nc + e),
        };
        if op.table.len() != len {
            return Err(invalid(format!(
                "table of `{}` has {} entries, {len} expected",
                op.name,
                op.table.len()
            )));
        }
        if op.table.iter().any(|&v| v >= bound) {
            return Err(invalid(format!("table of `{}` leaves its codomain", op.name)));
        }
        Ok(())
    }

    /// A triple `S ⊑ R ⊑ T` of distinct positions violating cast coherence.
    fn incoherent_triple(&self, sig: &Signature) -> Option<(usize, usize, usize)> {
        let k = self.exc_types.len();
        for s in 0..k {
            for r in 0..k {
                for t in 0..k {
                    if s == r || r == t || s == t || !sig.le_pos(s, r) || !sig.le_pos(r, t) {
                        continue;
                    }
                    if (0..self.exc_size(s)).any(|a| self.cast(s, t, a) != self.cast(r, t, self.cast(s, r, a))) {
                        return Some((s, r, t));
                    }
                }
            }
        }
        None
    }

    /// Whether the model was built for `sig`.
    pub fn fits(&self, sig: &Signature) -> bool {
        self.types == sig.types()
            && self.ops.len() == sig.ops().len()
            && self.ops.iter().zip(sig.ops()).all(|(a, b)| a.name == b.name && a.decoration == b.decoration)
            && self.exc_types.len() == sig.exceptional().len()
    }

    pub fn types(&self) -> &[TypeName] {
        &self.types
    }

    /// Element names of the carrier of the type at `index`.
    pub fn elements(&self, index: usize) -> &[String] {
        &self.elements[index]
    }

    pub fn ops(&self) -> &[OpTable] {
        &self.ops
    }

    pub fn casts(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.casts
    }

    pub fn exc_total(&self) -> usize {
        self.exc_total
    }

    /// Size of the carrier of an exceptional position.
    pub fn exc_size(&self, pos: usize) -> usize {
        self.elements[self.exc_types[pos]].len()
    }

    /// Type index of an exceptional position.
    pub fn exc_type_index(&self, pos: usize) -> usize {
        self.exc_types[pos]
    }

    pub fn size(&self, ty: &Ty) -> usize {
        match ty {
            Ty::Zero => 0,
            Ty::Named(n) => self
                .types
                .iter()
                .position(|t| t == n)
                .map_or(0, |i| self.elements[i].len()),
        }
    }

    /// Flat index of an exception in `Exc`.
    pub fn exc_index(&self, e: ExcValue) -> usize {
        self.exc_offsets[e.ty] + e.value
    }

    pub fn exc_at(&self, index: usize) -> ExcValue {
        // The last position starting at or before `index`; empty carriers
        // share their offset with the next position and are skipped.
        let ty = self.exc_offsets.partition_point(|&o| o <= index) - 1;
        ExcValue {
            ty,
            value: index - self.exc_offsets[ty],
        }
    }

    /// `cast[R,T]` applied to `a`; the identity when `r == t`.
    pub fn cast(&self, r: usize, t: usize, a: usize) -> usize {
        if r == t {
            a
        } else {
            self.casts[&(r, t)][a]
        }
    }

    pub fn op_table(&self, name: &str) -> Option<&OpTable> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Replaces the table of an operation, keeping the model valid.
    pub fn set_op_table(&mut self, name: &str, table: Vec<usize>) -> Result<(), SemanticsError> {
        let i = self
            .ops
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| invalid(format!("no operation `{name}`")))?;
        let mut op = self.ops[i].clone();
        op.table = table;
        self.check_op(&op)?;
        self.ops[i] = op;
        Ok(())
    }

    pub fn decode(&self, n_ord: usize, code: usize) -> EffValue {
        if code < n_ord {
            EffValue::Ordinary(code)
        } else {
            EffValue::Exceptional(self.exc_at(code - n_ord))
        }
    }

    pub fn encode(&self, n_ord: usize, v: EffValue) -> usize {
        match v {
            EffValue::Ordinary(i) => i,
            EffValue::Exceptional(e) => n_ord + self.exc_index(e),
        }
    }

    /// Human-readable form of a value of `[ty]+Exc`.
    pub fn show_value(&self, ty: &Ty, v: EffValue) -> String {
        match (v, ty) {
            (EffValue::Ordinary(i), Ty::Named(n)) => {
                let idx = self.types.iter().position(|t| t == n).unwrap_or(0);
                self.elements[idx].get(i).cloned().unwrap_or_else(|| format!("#{i}"))
            }
            (EffValue::Ordinary(i), Ty::Zero) => format!("#{i}"),
            (EffValue::Exceptional(e), _) => {
                let idx = self.exc_types[e.ty];
                format!("raise {} {}", self.types[idx], self.elements[idx][e.value])
            }
        }
    }

    /// The model as a DSL `model` block.
    pub fn to_dsl(&self, name: &str) -> String {
        let mut out = format!("model {name} {{\n");
        for (i, t) in self.types.iter().enumerate() {
            out += &format!("  {t} = {{{}}}\n", self.elements[i].join(", "));
        }
        for op in &self.ops {
            let (dom, cod) = (Ty::Named(self.types[op.dom].clone()), Ty::Named(self.types[op.cod].clone()));
            let nd = self.elements[op.dom].len();
            let nc = self.elements[op.cod].len();
            let entries: Vec<String> = op
                .table
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let out = match op.decoration {
                        Decoration::Pure => EffValue::Ordinary(v),
                        _ => self.decode(nc, v),
                    };
                    format!(
                        "{} -> {}",
                        self.show_value(&dom, self.decode(nd, i)),
                        self.show_value(&cod, out)
                    )
                })
                .collect();
            out += &format!("  {} = {{{}}}\n", op.name, entries.join(", "));
        }
        for (&(r, t), table) in &self.casts {
            let (ri, ti) = (self.exc_types[r], self.exc_types[t]);
            let entries: Vec<String> = table
                .iter()
                .enumerate()
                .map(|(a, &b)| format!("{} -> {}", self.elements[ri][a], self.elements[ti][b]))
                .collect();
            out += &format!(
                "  cast[{},{}] = {{{}}}\n",
                self.types[ri],
                self.types[ti],
                entries.join(", ")
            );
        }
        out += "}\n";
        out
    }

    fn lift_op(&self, op: &OpTable) -> EffFunction {
        let (nd, nc, e) = (self.elements[op.dom].len(), self.elements[op.cod].len(), self.exc_total);
        let table = match op.decoration {
            Decoration::Pure | Decoration::Propagator => {
                let mut t = op.table.clone();
                t.extend((0..e).map(|i| nc + i));
                t
            }
            Decoration::Catcher => op.table.clone(),
        };
        EffFunction {
            dom: Ty::Named(self.types[op.dom].clone()),
            cod: Ty::Named(self.types[op.cod].clone()),
            n_dom: nd,
            n_cod: nc,
            table,
        }
    }
}

/// A total table `[dom]+Exc -> [cod]+Exc` over encoded values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffFunction {
    pub dom: Ty,
    pub cod: Ty,
    pub n_dom: usize,
    pub n_cod: usize,
    pub table: Vec<usize>,
}

impl EffFunction {
    pub fn exc_total(&self) -> usize {
        self.table.len() - self.n_dom
    }

    pub fn apply_code(&self, code: usize) -> usize {
        self.table[code]
    }

    pub fn apply(&self, m: &Model, v: EffValue) -> EffValue {
        m.decode(self.n_cod, self.table[m.encode(self.n_dom, v)])
    }

    /// Every input of `[dom]+Exc`, ordinary values first.
    pub fn inputs<'a>(&self, m: &'a Model) -> impl Iterator<Item = EffValue> + 'a {
        let n = self.n_dom;
        (0..n + m.exc_total()).map(move |c| m.decode(n, c))
    }

    /// Whether every exception is mapped to itself.
    pub fn fixes_exceptions(&self) -> bool {
        (0..self.exc_total()).all(|e| self.table[self.n_dom + e] == self.n_cod + e)
    }

    pub fn ordinary_to_ordinary(&self) -> bool {
        self.table[..self.n_dom].iter().all(|&c| c < self.n_cod)
    }

    /// The table law of a decoration.
    pub fn satisfies(&self, d: Decoration) -> bool {
        match d {
            Decoration::Pure => self.fixes_exceptions() && self.ordinary_to_ordinary(),
            Decoration::Propagator => self.fixes_exceptions(),
            Decoration::Catcher => true,
        }
    }

    fn identity(dom: Ty, n: usize, e: usize) -> Self {
        EffFunction {
            cod: dom.clone(),
            dom,
            n_dom: n,
            n_cod: n,
            table: (0..n + e).collect(),
        }
    }

    /// `self o inner`.
    pub fn after(&self, inner: &EffFunction) -> EffFunction {
        EffFunction {
            dom: inner.dom.clone(),
            cod: self.cod.clone(),
            n_dom: inner.n_dom,
            n_cod: self.n_cod,
            table: inner.table.iter().map(|&c| self.table[c]).collect(),
        }
    }
}

fn exc_pos(sig: &Signature, t: &TypeName) -> Result<usize, SemanticsError> {
    sig.exc_position(t)
        .ok_or_else(|| SemanticsError::Term(TermError::NotExceptional(t.clone())))
}

fn interp(sig: &Signature, m: &Model, t: &Term) -> Result<EffFunction, SemanticsError> {
    let e = m.exc_total();
    Ok(match t {
        Term::Id(x) => EffFunction::identity(x.clone(), m.size(x), e),
        Term::Op(name) => {
            let op = m
                .op_table(name)
                .ok_or_else(|| SemanticsError::Term(TermError::UnknownOp(name.clone())))?;
            m.lift_op(op)
        }
        Term::Compose(g, f) => {
            let (tf, tg) = (interp(sig, m, f)?, interp(sig, m, g)?);
            if tf.cod != tg.dom {
                return Err(SemanticsError::ArityMismatch(format!("cannot compose `{g}` after `{f}`")));
            }
            tg.after(&tf)
        }
        Term::Empty(x) => {
            let n = m.size(x);
            EffFunction {
                dom: Ty::Zero,
                cod: x.clone(),
                n_dom: 0,
                n_cod: n,
                table: (0..e).map(|i| n + i).collect(),
            }
        }
        Term::Tag(tn) => {
            let p = exc_pos(sig, tn)?;
            let n = m.exc_size(p);
            let off = m.exc_index(ExcValue { ty: p, value: 0 });
            let mut table: Vec<usize> = (0..n).map(|a| off + a).collect();
            table.extend(0..e);
            EffFunction {
                dom: Ty::Named(tn.clone()),
                cod: Ty::Zero,
                n_dom: n,
                n_cod: 0,
                table,
            }
        }
        Term::Untag(tn) => {
            let p = exc_pos(sig, tn)?;
            let n = m.exc_size(p);
            let table = (0..e)
                .map(|i| {
                    let ev = m.exc_at(i);
                    if sig.untag_matches_pos(ev.ty, p) {
                        m.cast(ev.ty, p, ev.value)
                    } else {
                        n + i
                    }
                })
                .collect();
            EffFunction {
                dom: Ty::Zero,
                cod: Ty::Named(tn.clone()),
                n_dom: 0,
                n_cod: n,
                table,
            }
        }
        Term::Cast(r, tt) => {
            let (pr, pt) = (exc_pos(sig, r)?, exc_pos(sig, tt)?);
            if !sig.le_pos(pr, pt) {
                return Err(SemanticsError::Term(TermError::IllegalCast(r.clone(), tt.clone())));
            }
            let (nr, nt) = (m.exc_size(pr), m.exc_size(pt));
            let mut table: Vec<usize> = (0..nr).map(|a| m.cast(pr, pt, a)).collect();
            table.extend((0..e).map(|i| nt + i));
            EffFunction {
                dom: Ty::Named(r.clone()),
                cod: Ty::Named(tt.clone()),
                n_dom: nr,
                n_cod: nt,
                table,
            }
        }
        Term::Downcast(k) => {
            let tk = interp(sig, m, k)?;
            let mut table = tk.table[..tk.n_dom].to_vec();
            table.extend((0..e).map(|i| tk.n_cod + i));
            EffFunction { table, ..tk }
        }
        Term::Copair(g, k) => {
            let (tg, tk) = (interp(sig, m, g)?, interp(sig, m, k)?);
            let mut table = tg.table[..tg.n_dom].to_vec();
            table.extend_from_slice(&tk.table);
            EffFunction { table, ..tg }
        }
        Term::TagCase { branches, .. } => {
            let cod = typecheck(sig, t)?.cod;
            let n = m.size(&cod);
            let mut per_type: Vec<Option<EffFunction>> = vec![None; sig.exceptional().len()];
            for (tn, f) in branches {
                per_type[exc_pos(sig, tn)?] = Some(interp(sig, m, f)?);
            }
            let table = (0..e)
                .map(|i| {
                    let ev = m.exc_at(i);
                    per_type[ev.ty].as_ref().expect("typechecked tag-case covers Exc").table[ev.value]
                })
                .collect();
            EffFunction {
                dom: Ty::Zero,
                cod,
                n_dom: 0,
                n_cod: n,
                table,
            }
        }
        Term::Throw(..) | Term::TryCatch { .. } => interp(sig, m, &elaborate_head(sig, t)?)?,
    })
}

/// The table of a term in a model. `throw` and `try` are interpreted
/// through their elaboration.
pub fn interpret(sig: &Signature, m: &Model, t: &Term) -> Result<EffFunction, SemanticsError> {
    if !m.fits(sig) {
        return Err(invalid("model does not belong to this signature"));
    }
    let core = elaborate(sig, t)?;
    interp(sig, m, &core)
}

/// First input on which the two sides of `e` differ, among ordinary inputs
/// for a weak equation and among all inputs for a strong one.
pub fn equation_witness(sig: &Signature, m: &Model, e: &Equation) -> Result<Option<EffValue>, SemanticsError> {
    let l = interpret(sig, m, &e.lhs)?;
    let r = interpret(sig, m, &e.rhs)?;
    if l.dom != r.dom || l.cod != r.cod {
        return Err(SemanticsError::ArityMismatch(format!(
            "sides of `{e}` are {} -> {} and {} -> {}",
            l.dom, l.cod, r.dom, r.cod
        )));
    }
    let upto = match e.mode {
        Mode::Strong => l.table.len(),
        Mode::Weak => l.n_dom,
    };
    Ok((0..upto).find(|&c| l.table[c] != r.table[c]).map(|c| m.decode(l.n_dom, c)))
}

pub fn eval_equation(sig: &Signature, m: &Model, e: &Equation) -> Result<bool, SemanticsError> {
    Ok(equation_witness(sig, m, e)?.is_none())
}

/// Semantic truth of a judgment. Formation judgments hold when they are
/// well formed; a decoration holds when the table obeys its law.
pub fn holds(sig: &Signature, m: &Model, j: &Judgment) -> Result<bool, SemanticsError> {
    match j {
        Judgment::IsType(_) | Judgment::IsExc(_) => Ok(true),
        Judgment::HasType(t, a) => Ok(typecheck(sig, t)? == *a),
        Judgment::Deco(t, d) => Ok(interpret(sig, m, t)?.satisfies(*d)),
        Judgment::Eq(e) => eval_equation(sig, m, e),
    }
}

impl fmt::Display for EffValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffValue::Ordinary(i) => write!(f, "#{i}"),
            EffValue::Exceptional(e) => write!(f, "exc({}, #{})", e.ty, e.value),
        }
    }
}

#[cfg(test)]
mod tests;
