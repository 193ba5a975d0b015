//! The `exdeco` command line. Exit status 0 on success, 1 when a proof is
//! rejected, a term is ill formed or a counterexample is found, 2 on usage,
//! input or parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::dynev::{dynamic_rank, Matrix, RankMode};
use crate::kernel::{check_proof, Equation, Judgment, Verdict};
use crate::semantics::{enumerate_models_seeded, equation_witness, interpret, Model, DEFAULT_SEED};
use crate::surface::{load, parse_term, resolve_term, Document, SurfaceError};
use crate::term::{check_term, elaborate, Term};
use crate::BigInt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "exdeco", version, about = "Proof checker and model checker for decorated equations with exceptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every proof in the given files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print arity and decoration of each named term.
    Infer {
        file: PathBuf,
        /// Infer this term instead of the named ones.
        #[arg(long)]
        term: Option<String>,
    },
    /// Print the core form of each named term and equation.
    Elaborate {
        file: PathBuf,
        #[arg(long)]
        term: Option<String>,
    },
    /// Evaluate named equations in the models of the file.
    Eval {
        file: PathBuf,
        /// Only these equations (repeatable).
        #[arg(long = "eq")]
        equations: Vec<String>,
        /// Only these models (repeatable).
        #[arg(long = "model")]
        models: Vec<String>,
    },
    /// Search bounded models for a counterexample to each equation.
    Modelcheck {
        file: PathBuf,
        /// Largest carrier size.
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// Most models to examine per equation.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        /// Seed for sampling when the model space exceeds the budget.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long = "eq")]
        equations: Vec<String>,
    },
    /// Rank of an integer matrix modulo every factor that elimination exposes.
    Rank {
        #[arg(long)]
        modulus: BigInt,
        /// File with `rows cols` followed by the entries.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "restart")]
        mode: RankMode,
    },
}

/// Output of one command, flushed in order.
#[derive(Default)]
struct Report {
    out: String,
    err: String,
    code: i32,
}

impl Report {
    fn fail(&mut self, code: i32) {
        self.code = self.code.max(code);
    }
}

fn read(path: &PathBuf, r: &mut Report) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(r.err, "{}: {e}", path.display());
            r.fail(EXIT_USAGE);
            None
        }
    }
}

fn load_file(path: &PathBuf, r: &mut Report) -> Option<Document> {
    let src = read(path, r)?;
    match load(&src) {
        Ok(doc) => {
            for w in &doc.diagnostics {
                let _ = writeln!(r.err, "{}", w.render(&path.display().to_string()));
            }
            Some(doc)
        }
        Err(e) => {
            let _ = writeln!(r.err, "{}", e.diagnostic().render(&path.display().to_string()));
            r.fail(EXIT_USAGE);
            None
        }
    }
}

fn cli_term(doc: &Document, text: &str, r: &mut Report) -> Option<Term> {
    match parse_term(text).and_then(|t| resolve_term(doc, &t)) {
        Ok(t) => Some(t),
        Err(e) => {
            let d = e.diagnostic();
            let kind = if matches!(e, SurfaceError::Syntax(_)) { "syntax error" } else { "error" };
            let _ = writeln!(r.err, "--term:{}: {kind}: {}", d.at, d.message);
            r.fail(EXIT_USAGE);
            None
        }
    }
}

fn check(files: &[PathBuf]) -> Report {
    let reports: Vec<Report> = files.par_iter().map(|f| check_file(f)).collect();
    let mut all = Report::default();
    for r in reports {
        all.out += &r.out;
        all.err += &r.err;
        all.fail(r.code);
    }
    all
}

fn check_file(path: &PathBuf) -> Report {
    let mut r = Report::default();
    let Some(doc) = load_file(path, &mut r) else {
        return r;
    };
    let file = path.display().to_string();
    let sig = &doc.signature;
    for t in &doc.terms {
        let res = check_term(sig, &t.term).map_err(|e| e.to_string()).and_then(|(a, _)| match &t.arity {
            Some(want) if *want != a => Err(format!("has arity {a}, not {want}")),
            _ => Ok(()),
        });
        if let Err(e) = res {
            let _ = writeln!(r.out, "{file}:{}: error: term {}: {e}", t.at, t.name);
            r.fail(EXIT_REJECTED);
        }
    }
    for e in &doc.equations {
        if let Err(err) = e.equation.arity(sig) {
            let _ = writeln!(r.out, "{file}:{}: error: equation {}: {err}", e.at, e.name);
            r.fail(EXIT_REJECTED);
        }
    }
    for p in &doc.proofs {
        match check_proof(sig, &p.proof) {
            Verdict::Accepted(trace) => {
                let goal = doc.equation(&p.name).map(|e| Judgment::Eq(e.equation.clone()));
                match goal {
                    Some(g) if g != p.proof.conclusion => {
                        let _ = writeln!(
                            r.out,
                            "{file}:{}: error: proof {} concludes `{}` but the statement is `{g}`",
                            p.at, p.name, p.proof.conclusion
                        );
                        r.fail(EXIT_REJECTED);
                    }
                    _ => {
                        let _ = writeln!(
                            r.out,
                            "{file}: proof {}: accepted ({} steps, {} kernel calls): {}",
                            p.name,
                            trace.steps.len(),
                            trace.kernel_calls(),
                            p.proof.conclusion
                        );
                    }
                }
            }
            Verdict::Rejected(rej) => {
                let at = rej.label.as_ref().and_then(|l| p.steps.get(l)).copied().unwrap_or(p.at);
                let _ = writeln!(r.out, "{file}:{at}: error: proof {} rejected: {rej}", p.name);
                r.fail(EXIT_REJECTED);
            }
        }
    }
    if doc.proofs.is_empty() {
        let _ = writeln!(r.out, "{file}: no proofs");
    }
    r
}

fn infer(path: &PathBuf, term: Option<&str>) -> Report {
    let mut r = Report::default();
    let Some(doc) = load_file(path, &mut r) else {
        return r;
    };
    let items: Vec<(Option<&str>, Term)> = match term {
        Some(text) => match cli_term(&doc, text, &mut r) {
            Some(t) => vec![(None, t)],
            None => return r,
        },
        None => doc.terms.iter().map(|t| (Some(t.name.as_str()), t.term.clone())).collect(),
    };
    for (name, t) in items {
        let prefix = name.map(|n| format!("{n} : ")).unwrap_or_default();
        match check_term(&doc.signature, &t) {
            Ok((a, d)) => {
                let asserted = name.and_then(|n| doc.term(n)).and_then(|t| t.arity.clone());
                if let Some(want) = asserted.filter(|w| *w != a) {
                    let _ = writeln!(r.out, "{prefix}{a}, {d} (declared {want})");
                    r.fail(EXIT_REJECTED);
                } else {
                    let _ = writeln!(r.out, "{prefix}{a}, {d}");
                }
            }
            Err(e) => {
                let _ = writeln!(r.out, "{prefix}error: {e}");
                r.fail(EXIT_REJECTED);
            }
        }
    }
    r
}

fn elaborate_cmd(path: &PathBuf, term: Option<&str>) -> Report {
    let mut r = Report::default();
    let Some(doc) = load_file(path, &mut r) else {
        return r;
    };
    let sig = &doc.signature;
    let core = |t: &Term| check_term(sig, t).and_then(|_| elaborate(sig, t)).map_err(|e| e.to_string());
    if let Some(text) = term {
        if let Some(t) = cli_term(&doc, text, &mut r) {
            match core(&t) {
                Ok(c) => {
                    let _ = writeln!(r.out, "{c}");
                }
                Err(e) => {
                    let _ = writeln!(r.out, "error: {e}");
                    r.fail(EXIT_REJECTED);
                }
            }
        }
        return r;
    }
    for t in &doc.terms {
        match core(&t.term) {
            Ok(c) => {
                let _ = writeln!(r.out, "{} = {c}", t.name);
            }
            Err(e) => {
                let _ = writeln!(r.out, "{}: error: {e}", t.name);
                r.fail(EXIT_REJECTED);
            }
        }
    }
    for e in &doc.equations {
        match (core(&e.equation.lhs), core(&e.equation.rhs)) {
            (Ok(l), Ok(rhs)) => {
                let _ = writeln!(r.out, "{}: {l} {} {rhs}", e.name, e.equation.mode.symbol());
            }
            (Err(err), _) | (_, Err(err)) => {
                let _ = writeln!(r.out, "{}: error: {err}", e.name);
                r.fail(EXIT_REJECTED);
            }
        }
    }
    r
}

fn select<'a>(doc: &'a Document, names: &[String], r: &mut Report) -> Option<Vec<&'a crate::surface::NamedEquation>> {
    if names.is_empty() {
        return Some(doc.equations.iter().collect());
    }
    let mut out = Vec::new();
    for n in names {
        match doc.equation(n) {
            Some(e) => out.push(e),
            None => {
                let _ = writeln!(r.err, "no equation named `{n}`");
                r.fail(EXIT_USAGE);
                return None;
            }
        }
    }
    Some(out)
}

/// Describes where `e` fails in `m`, if it does.
fn failure(doc: &Document, m: &Model, e: &Equation) -> Result<Option<String>, String> {
    let sig = &doc.signature;
    let Some(w) = equation_witness(sig, m, e).map_err(|e| e.to_string())? else {
        return Ok(None);
    };
    let a = e.arity(sig).map_err(|e| e.to_string())?;
    let l = interpret(sig, m, &e.lhs).map_err(|e| e.to_string())?.apply(m, w);
    let rv = interpret(sig, m, &e.rhs).map_err(|e| e.to_string())?.apply(m, w);
    Ok(Some(format!(
        "  input  {}\n  lhs    {}\n  rhs    {}\n",
        m.show_value(&a.dom, w),
        m.show_value(&a.cod, l),
        m.show_value(&a.cod, rv)
    )))
}

fn eval(path: &PathBuf, eqs: &[String], models: &[String]) -> Report {
    let mut r = Report::default();
    let Some(doc) = load_file(path, &mut r) else {
        return r;
    };
    let Some(eqs) = select(&doc, eqs, &mut r) else {
        return r;
    };
    let mut ms = Vec::new();
    if models.is_empty() {
        ms.extend(doc.models.iter());
    } else {
        for n in models {
            match doc.model(n) {
                Some(m) => ms.push(m),
                None => {
                    let _ = writeln!(r.err, "no model named `{n}`");
                    r.fail(EXIT_USAGE);
                    return r;
                }
            }
        }
    }
    if ms.is_empty() {
        let _ = writeln!(r.err, "{}: no models to evaluate in", path.display());
        r.fail(EXIT_USAGE);
        return r;
    }
    for e in eqs {
        for m in &ms {
            match failure(&doc, &m.model, &e.equation) {
                Ok(None) => {
                    let _ = writeln!(r.out, "{} in {}: holds", e.name, m.name);
                }
                Ok(Some(why)) => {
                    let _ = write!(r.out, "{} in {}: fails\n{why}", e.name, m.name);
                    r.fail(EXIT_REJECTED);
                }
                Err(err) => {
                    let _ = writeln!(r.out, "{} in {}: error: {err}", e.name, m.name);
                    r.fail(EXIT_REJECTED);
                }
            }
        }
    }
    r
}

fn modelcheck(path: &PathBuf, bound: usize, budget: usize, seed: u64, eqs: &[String]) -> Report {
    let mut r = Report::default();
    let Some(doc) = load_file(path, &mut r) else {
        return r;
    };
    let Some(eqs) = select(&doc, eqs, &mut r) else {
        return r;
    };
    let sig = &doc.signature;
    let stream = enumerate_models_seeded(sig, bound, budget, seed);
    let how = if stream.is_exhaustive() {
        format!("all models up to size {bound}")
    } else {
        format!("sampled, size {bound}, seed {seed:#x}")
    };
    let models: Vec<Model> = stream.collect();
    for e in eqs {
        if let Err(err) = e.equation.arity(sig) {
            let _ = writeln!(r.out, "{}: error: {err}", e.name);
            r.fail(EXIT_REJECTED);
            continue;
        }
        let found = models
            .par_iter()
            .map(|m| failure(&doc, m, &e.equation))
            .position_first(|f| !matches!(f, Ok(None)));
        match found {
            None => {
                let _ = writeln!(r.out, "{}: holds in {} models ({how})", e.name, models.len());
            }
            Some(i) => match failure(&doc, &models[i], &e.equation) {
                Ok(Some(why)) => {
                    let _ = write!(
                        r.out,
                        "{}: counterexample (model {} of {}, {how})\n{why}{}",
                        e.name,
                        i + 1,
                        models.len(),
                        models[i].to_dsl("Counterexample")
                    );
                    r.fail(EXIT_REJECTED);
                }
                Ok(None) => unreachable!("failure is deterministic"),
                Err(err) => {
                    let _ = writeln!(r.out, "{}: error: {err}", e.name);
                    r.fail(EXIT_REJECTED);
                }
            },
        }
    }
    r
}

fn rank(modulus: &BigInt, matrix: &PathBuf, mode: RankMode) -> Report {
    let mut r = Report::default();
    let Some(text) = read(matrix, &mut r) else {
        return r;
    };
    let res = Matrix::<BigInt>::parse(&text).and_then(|m| dynamic_rank(&m, modulus, mode));
    match res {
        Ok(split) => r.out += &split.to_string(),
        Err(e) => {
            let _ = writeln!(r.err, "rank: {e}");
            r.fail(EXIT_USAGE);
        }
    }
    r
}

/// Runs one command line (program name first) and returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let report = match &cli.command {
        Command::Check { files } => check(files),
        Command::Infer { file, term } => infer(file, term.as_deref()),
        Command::Elaborate { file, term } => elaborate_cmd(file, term.as_deref()),
        Command::Eval { file, equations, models } => eval(file, equations, models),
        Command::Modelcheck {
            file,
            bound,
            budget,
            seed,
            equations,
        } => modelcheck(file, *bound, *budget, *seed, equations),
        Command::Rank { modulus, matrix, mode } => rank(modulus, matrix, *mode),
    };
    let _ = out.write_all(report.out.as_bytes());
    let _ = err.write_all(report.err.as_bytes());
    report.code
}
