//! The trusted core: judgments, proofs as explicit trees of rule
//! applications, and the checker.
//!
//! A node is accepted when its conclusion is well formed and, together with
//! the conclusions of its premises, instantiates the schema of its rule.
//! Nodes are checked bottom-up; the first failure in post-order is reported
//! with its path from the root.

pub mod rules;
pub mod schema;

use std::fmt;

use thiserror::Error;

pub use rules::{RuleGroup, RuleName};
pub use schema::{Bindings, Schema};

use crate::signature::Signature;
use crate::term::{check_term, typecheck, Arity, Decoration, Term, TermError, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Strong,
    Weak,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        })
    }
}

impl Mode {
    /// `==` or `~~`.
    pub fn symbol(self) -> &'static str {
        match self {
            Mode::Strong => "==",
            Mode::Weak => "~~",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub mode: Mode,
}

impl Equation {
    pub fn strong(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs, mode: Mode::Strong }
    }

    pub fn weak(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs, mode: Mode::Weak }
    }

    /// The common arity of both sides.
    pub fn arity(&self, sig: &Signature) -> Result<Arity, KernelError> {
        let (l, _) = check_term(sig, &self.lhs)?;
        let (r, _) = check_term(sig, &self.rhs)?;
        if l != r {
            return Err(KernelError::ArityMismatch(format!(
                "sides have arities {l} and {r}"
            )));
        }
        Ok(l)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.mode.symbol(), self.rhs)
    }
}

/// What a proof node claims.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgment {
    /// `X` is a type.
    IsType(Ty),
    /// `T` is an exceptional type.
    IsExc(Ty),
    /// `f : X -> Y`
    HasType(Term, Arity),
    /// `f` has decoration `d`.
    Deco(Term, Decoration),
    Eq(Equation),
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::IsType(x) => write!(f, "type {x}"),
            Judgment::IsExc(t) => write!(f, "exc {t}"),
            Judgment::HasType(t, a) => write!(f, "{t} : {a}"),
            Judgment::Deco(t, d) => write!(f, "{} {t}", d.keyword()),
            Judgment::Eq(e) => write!(f, "{e}"),
        }
    }
}

impl Judgment {
    /// Every term in the judgment must be well formed; a typing claim must
    /// state the actual arity and both sides of an equation must agree.
    pub fn check_well_formed(&self, sig: &Signature) -> Result<(), KernelError> {
        match self {
            Judgment::IsType(_) | Judgment::IsExc(_) => Ok(()),
            Judgment::HasType(t, a) => {
                check_term(sig, t)?;
                let got = typecheck(sig, t)?;
                if got != *a {
                    return Err(KernelError::ArityMismatch(format!(
                        "`{t}` has arity {got}, not {a}"
                    )));
                }
                Ok(())
            }
            Judgment::Deco(t, _) => {
                check_term(sig, t)?;
                Ok(())
            }
            Judgment::Eq(e) => e.arity(sig).map(|_| ()),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("decoration violation: {0}")]
    DecorationViolation(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("missing binding for metavariable {0}")]
    MissingBinding(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("ill-formed term: {0}")]
    IllFormed(#[from] TermError),
}

/// A tree of rule applications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub rule: RuleName,
    pub premises: Vec<Proof>,
    pub conclusion: Judgment,
    /// Step label from a proof script, for reporting.
    pub label: Option<String>,
}

impl Proof {
    pub fn new(rule: RuleName, premises: Vec<Proof>, conclusion: Judgment) -> Self {
        Proof {
            rule,
            premises,
            conclusion,
            label: None,
        }
    }

    pub fn leaf(rule: RuleName, conclusion: Judgment) -> Self {
        Self::new(rule, vec![], conclusion)
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Proof::node_count).sum::<usize>()
    }

    /// The node at `path`.
    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get(i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Proof> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get_mut(i)?.at_mut(rest),
        }
    }

    /// Paths of every node, in post-order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn walk(p: &Proof, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            for (i, q) in p.premises.iter().enumerate() {
                prefix.push(i);
                walk(q, prefix, out);
                prefix.pop();
            }
            out.push(prefix.clone());
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discharge {
    /// An application of a rule of the logic.
    Rule,
    /// A leaf discharged by the term checker (typecheck or inference).
    KernelCall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub path: Vec<usize>,
    pub label: Option<String>,
    pub rule: RuleName,
    pub discharge: Discharge,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    /// Checked nodes in post-order.
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn kernel_calls(&self) -> usize {
        self.steps.iter().filter(|s| s.discharge == Discharge::KernelCall).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub path: Vec<usize>,
    pub label: Option<String>,
    pub rule: RuleName,
    pub error: KernelError,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "step {l} ")?;
        }
        write!(f, "[path {}] by {}: {}", fmt_path(&self.path), self.rule, self.error)
    }
}

/// Dotted premise indices from the root, `root` for the empty path.
pub fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted(Trace),
    Rejected(Rejection),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

/// Checks one rule application given the conclusions of its premises.
pub fn check_step(
    sig: &Signature,
    rule: RuleName,
    premises: &[&Judgment],
    conclusion: &Judgment,
) -> Result<Discharge, KernelError> {
    conclusion.check_well_formed(sig)?;
    rule.schema().match_instance(sig, conclusion, premises)?;
    Ok(if rule.is_kernel_call() {
        Discharge::KernelCall
    } else {
        Discharge::Rule
    })
}

/// Checks a whole proof tree.
pub fn check_proof(sig: &Signature, proof: &Proof) -> Verdict {
    fn go(sig: &Signature, p: &Proof, path: &mut Vec<usize>, trace: &mut Trace) -> Result<(), Rejection> {
        for (i, q) in p.premises.iter().enumerate() {
            path.push(i);
            go(sig, q, path, trace)?;
            path.pop();
        }
        let premises: Vec<&Judgment> = p.premises.iter().map(|q| &q.conclusion).collect();
        match check_step(sig, p.rule, &premises, &p.conclusion) {
            Ok(discharge) => {
                trace.steps.push(TraceStep {
                    path: path.clone(),
                    label: p.label.clone(),
                    rule: p.rule,
                    discharge,
                });
                Ok(())
            }
            Err(error) => Err(Rejection {
                path: path.clone(),
                label: p.label.clone(),
                rule: p.rule,
                error,
            }),
        }
    }
    let mut trace = Trace::default();
    match go(sig, proof, &mut Vec::new(), &mut trace) {
        Ok(()) => Verdict::Accepted(trace),
        Err(r) => Verdict::Rejected(r),
    }
}

/// The conclusion `rule` yields under `bindings`, after checking its side
/// conditions.
pub fn instantiate_rule(sig: &Signature, rule: RuleName, bindings: &Bindings) -> Result<Judgment, KernelError> {
    let schema = rule.schema();
    let conclusion = schema.conclusion.instantiate(bindings)?;
    schema.check_side(sig, bindings)?;
    conclusion.check_well_formed(sig)?;
    Ok(conclusion)
}

/// The premises `rule` requires under `bindings`.
pub fn instantiate_premises(sig: &Signature, rule: RuleName, bindings: &Bindings) -> Result<Vec<Judgment>, KernelError> {
    rule.schema().instantiate_premises(sig, bindings)
}
