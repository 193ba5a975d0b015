//! Signatures: base types and operations, the exceptional subset, and the
//! optional subtyping order on exceptional types.
//!
//! A [`SignatureDecl`] is plain data as written by a user. [`validate`] turns
//! it into an immutable [`Signature`] that every other module takes by
//! reference.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::Decoration;

/// Name of a declared type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeName(Arc<str>);

impl TypeName {
    pub fn new(name: impl AsRef<str>) -> Self {
        TypeName(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TypeName {
    fn from(s: &str) -> Self {
        TypeName::new(s)
    }
}

impl From<String> for TypeName {
    fn from(s: String) -> Self {
        TypeName::new(s)
    }
}

/// A basic operation `name : dom -> cod`.
///
/// Basic operations are pure. A declared decoration above `Pure` turns the
/// symbol into an abstract effectful operation whose interpretation ranges
/// over all tables of that decoration; this is how lemmas quantified over
/// "every propagator `g`" are stated and model-checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub dom: TypeName,
    pub cod: TypeName,
    pub decoration: Decoration,
}

/// Unvalidated signature, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureDecl {
    pub types: Vec<TypeName>,
    pub exceptional: Vec<TypeName>,
    pub ops: Vec<OpDecl>,
    /// Generating pairs `(sub, sup)` of the subtyping order.
    pub subtype: Vec<(TypeName, TypeName)>,
    /// Use the hierarchy-aware untagging semantics. Implied by any subtype pair.
    pub hierarchy: bool,
}

impl SignatureDecl {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ty(mut self, name: &str) -> Self {
        self.types.push(name.into());
        self
    }

    /// Declares `name` as a type and marks it exceptional.
    pub fn exception(mut self, name: &str) -> Self {
        self.types.push(name.into());
        self.exceptional.push(name.into());
        self
    }

    pub fn op(self, name: &str, dom: &str, cod: &str) -> Self {
        self.op_decorated(name, dom, cod, Decoration::Pure)
    }

    pub fn op_decorated(mut self, name: &str, dom: &str, cod: &str, decoration: Decoration) -> Self {
        self.ops.push(OpDecl {
            name: name.to_string(),
            dom: dom.into(),
            cod: cod.into(),
            decoration,
        });
        self
    }

    /// Declares `sub ⊑ sup`.
    pub fn subtype(mut self, sub: &str, sup: &str) -> Self {
        self.subtype.push((sub.into(), sup.into()));
        self.hierarchy = true;
        self
    }

    pub fn hierarchy(mut self, on: bool) -> Self {
        self.hierarchy = on;
        self
    }

    pub fn validate(self) -> Result<Signature, SignatureError> {
        validate(self)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("subtyping is not a partial order: `{0}` and `{1}` are mutual subtypes")]
    NonPartialOrder(String, String),
    #[error("subtyping involves non-exceptional type `{0}`")]
    NonExceptionalSubtype(String),
}

/// A validated, immutable signature.
#[derive(Clone, Debug)]
pub struct Signature {
    types: Vec<TypeName>,
    type_index: HashMap<TypeName, usize>,
    ops: Vec<OpDecl>,
    op_index: HashMap<String, usize>,
    /// Exceptional types in declaration order.
    exceptional: Vec<TypeName>,
    exc_index: HashMap<TypeName, usize>,
    /// Reflexive-transitive subtyping over exceptional positions: `le[r][t]` iff `r ⊑ t`.
    le: Vec<Vec<bool>>,
    hierarchy: bool,
}

/// Identifiers start with a letter or `_` and continue with alphanumerics,
/// `_` or `'`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Checks every signature invariant and closes the subtyping relation
/// reflexively and transitively.
pub fn validate(decl: SignatureDecl) -> Result<Signature, SignatureError> {
    let mut type_index = HashMap::new();
    for (i, t) in decl.types.iter().enumerate() {
        if !is_identifier(t.as_str()) {
            return Err(SignatureError::InvalidName(t.to_string()));
        }
        if type_index.insert(t.clone(), i).is_some() {
            return Err(SignatureError::DuplicateName {
                kind: "type",
                name: t.to_string(),
            });
        }
    }

    let mut op_index = HashMap::new();
    for (i, op) in decl.ops.iter().enumerate() {
        if !is_identifier(&op.name) {
            return Err(SignatureError::InvalidName(op.name.clone()));
        }
        for t in [&op.dom, &op.cod] {
            if !type_index.contains_key(t) {
                return Err(SignatureError::UnknownType(t.to_string()));
            }
        }
        if op_index.insert(op.name.clone(), i).is_some() {
            return Err(SignatureError::DuplicateName {
                kind: "operation",
                name: op.name.clone(),
            });
        }
    }

    let mut exc_index = HashMap::new();
    let mut exceptional = Vec::new();
    for t in &decl.exceptional {
        if !type_index.contains_key(t) {
            return Err(SignatureError::UnknownType(t.to_string()));
        }
        if exc_index.insert(t.clone(), exceptional.len()).is_some() {
            return Err(SignatureError::DuplicateName {
                kind: "exceptional type",
                name: t.to_string(),
            });
        }
        exceptional.push(t.clone());
    }

    let n = exceptional.len();
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for (sub, sup) in &decl.subtype {
        let pos = |t: &TypeName| {
            if !type_index.contains_key(t) {
                Err(SignatureError::UnknownType(t.to_string()))
            } else {
                exc_index
                    .get(t)
                    .copied()
                    .ok_or_else(|| SignatureError::NonExceptionalSubtype(t.to_string()))
            }
        };
        let (a, b) = (pos(sub)?, pos(sup)?);
        le[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if le[i][k] {
                for j in 0..n {
                    if le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if le[i][j] && le[j][i] {
                return Err(SignatureError::NonPartialOrder(
                    exceptional[i].to_string(),
                    exceptional[j].to_string(),
                ));
            }
        }
    }

    Ok(Signature {
        types: decl.types,
        type_index,
        ops: decl.ops,
        op_index,
        exceptional,
        exc_index,
        le,
        hierarchy: decl.hierarchy || !decl.subtype.is_empty(),
    })
}

impl Signature {
    pub fn types(&self) -> &[TypeName] {
        &self.types
    }

    pub fn type_index(&self, t: &TypeName) -> Option<usize> {
        self.type_index.get(t).copied()
    }

    pub fn is_type(&self, t: &TypeName) -> bool {
        self.type_index.contains_key(t)
    }

    pub fn ops(&self) -> &[OpDecl] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.op_index.get(name).map(|&i| &self.ops[i])
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.op_index.get(name).copied()
    }

    /// Exceptional types in declaration order.
    pub fn exceptional(&self) -> &[TypeName] {
        &self.exceptional
    }

    pub fn is_exceptional(&self, t: &TypeName) -> bool {
        self.exc_index.contains_key(t)
    }

    /// Position of `t` among the exceptional types.
    pub fn exc_position(&self, t: &TypeName) -> Option<usize> {
        self.exc_index.get(t).copied()
    }

    pub fn hierarchy(&self) -> bool {
        self.hierarchy
    }

    /// `r ⊑ t` between exceptional positions.
    pub fn le_pos(&self, r: usize, t: usize) -> bool {
        self.le[r][t]
    }

    /// Whether untagging at `t` recovers an exception tagged at `r`: equality
    /// without a hierarchy, `r ⊑ t` with one.
    pub fn untag_matches_pos(&self, r: usize, t: usize) -> bool {
        if self.hierarchy {
            self.le[r][t]
        } else {
            r == t
        }
    }

    /// Whether the cast operation `cast[r,t]` exists, i.e. `r ⊑ t`.
    pub fn cast_exists(&self, r: &TypeName, t: &TypeName) -> Result<bool, SignatureError> {
        let pos = |x: &TypeName| {
            self.exc_position(x)
                .ok_or_else(|| SignatureError::UnknownType(x.to_string()))
        };
        Ok(self.le[pos(r)?][pos(t)?])
    }

    /// All pairs `(r, t)` with `r ⊑ t`, reflexive pairs included, in
    /// declaration order of `r` then `t`.
    pub fn cast_pairs(&self) -> Vec<(TypeName, TypeName)> {
        let n = self.exceptional.len();
        let mut out = Vec::new();
        for r in 0..n {
            for t in 0..n {
                if self.le[r][t] {
                    out.push((self.exceptional[r].clone(), self.exceptional[t].clone()));
                }
            }
        }
        out
    }
}
