//! A proof kernel, elaborator and finite-model oracle for the decorated
//! equational logic of exceptions, plus an exception-driven rank algorithm
//! over residue rings.
pub mod cli;
pub mod dynev;
pub mod kernel;
pub mod semantics;
pub mod signature;
pub mod surface;
pub mod term;

pub use kernel::{check_proof, instantiate_rule, Equation, Judgment, KernelError, Mode, Proof, RuleName, Verdict};
pub use semantics::{enumerate_models, eval_equation, interpret, soundness_check, EffFunction, EffValue, Model};
pub use signature::{validate, OpDecl, Signature, SignatureDecl, SignatureError, TypeName};
pub use term::{elaborate, infer_decoration, typecheck, Arity, Decoration, Term, TermError, Ty};

/// Residue-ring integers used by the command line.
pub type BigInt = num_bigint::BigInt;
pub type Matrix64 = dynev::Matrix<i64>;
pub type BigMatrix = dynev::Matrix<BigInt>;
pub type SplitRank64 = dynev::SplitRankResult<i64>;
pub type BigSplitRank = dynev::SplitRankResult<BigInt>;
