//! The text format: signatures, named terms and equations, models and proof
//! scripts. See `docs/grammar.md` for the grammar.
//!
//! [`parse`] produces a [`SourceFile`] whose identifiers are unresolved;
//! [`resolve`] checks names in declaration order and builds signature,
//! models and proof trees.

mod lex;
mod parse;
mod print;
mod resolve;

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use crate::kernel::{Equation, Judgment};
use crate::term::{Decoration, Term, Ty};

pub use parse::{parse, parse_term};
pub use print::print;
pub use resolve::{
    load, resolve, resolve_term, Document, NamedEquation, NamedModel, NamedProof, NamedTerm,
};

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A node with its source position. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Located<T> {
    pub at: Span,
    pub node: T,
}

impl<T: PartialEq> PartialEq for Located<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T: Eq> Eq for Located<T> {}

impl<T> Deref for Located<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.node
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Note,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub at: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(at: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            at,
            message: message.into(),
        }
    }

    pub fn warning(at: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            at,
            message: message.into(),
        }
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}: {}: {}", self.at, self.severity, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.at, self.severity, self.message)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("syntax error at {0}")]
    Syntax(Diagnostic),
    #[error("unknown identifier at {0}")]
    UnknownIdentifier(Diagnostic),
    /// Names resolve but the declarations are inconsistent.
    #[error("invalid declaration at {0}")]
    Invalid(Diagnostic),
}

impl SurfaceError {
    pub fn diagnostic(&self) -> &Diagnostic {
        match self {
            SurfaceError::Syntax(d) | SurfaceError::UnknownIdentifier(d) | SurfaceError::Invalid(d) => d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigItem {
    Type(String),
    Exception { name: String, extends: Option<String> },
    Op {
        name: String,
        decoration: Option<Decoration>,
        dom: String,
        cod: String,
    },
    /// Hierarchy-aware untagging without declaring any subtype.
    Hierarchy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDef {
    pub name: String,
    pub arity: Option<(Ty, Ty)>,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqDef {
    /// Written with `lemma` rather than `eq`.
    pub lemma: bool,
    pub name: String,
    pub equation: Equation,
}

/// A model value as written: an element name or `raise T e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueText {
    Elem(String),
    Raise(String, String),
}

impl fmt::Display for ValueText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueText::Elem(e) => f.write_str(e),
            ValueText::Raise(t, e) => write!(f, "raise {t} {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryItem {
    Value(ValueText),
    Map(ValueText, ValueText),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelEntry {
    /// `X = {...}`: a carrier when `X` is a type, a table when it is an
    /// operation.
    Assign { name: String, items: Vec<EntryItem> },
    Cast { sub: String, sup: String, items: Vec<(String, String)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDef {
    pub name: String,
    pub entries: Vec<Located<ModelEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub label: String,
    pub judgment: Judgment,
    pub rule: String,
    pub premises: Vec<String>,
}

/// The last step is the root of the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDef {
    pub name: String,
    pub steps: Vec<Located<Step>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Sig(SigItem),
    Term(TermDef),
    Eq(EqDef),
    Model(ModelDef),
    Proof(ProofDef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub items: Vec<Located<Item>>,
}

/// Words that cannot name a type, operation, term or element.
pub const KEYWORDS: &[&str] = &[
    "type", "exception", "extends", "op", "hierarchy", "term", "eq", "lemma", "model", "proof", "by", "raise",
    "exc", "id", "empty", "tag", "untag", "downcast", "case", "cast", "throw", "try", "catch", "o", "pure", "ppg",
    "ctc",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[cfg(test)]
mod tests;
