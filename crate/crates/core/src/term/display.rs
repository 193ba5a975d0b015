use std::fmt;

use super::{Clause, Term};

fn write_clauses(f: &mut fmt::Formatter<'_>, clauses: &[Clause]) -> fmt::Result {
    f.write_str("{")?;
    for (i, (t, body)) in clauses.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t} => {body}")?;
    }
    f.write_str("}")
}

// Composition is right-associative, so only a composite on the left of `o`
// needs parentheses.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Id(x) => write!(f, "id[{x}]"),
            Term::Op(name) => f.write_str(name),
            Term::Compose(g, h) => {
                if matches!(**g, Term::Compose(..)) {
                    write!(f, "({g}) o {h}")
                } else {
                    write!(f, "{g} o {h}")
                }
            }
            Term::Empty(x) => write!(f, "empty[{x}]"),
            Term::Tag(t) => write!(f, "tag[{t}]"),
            Term::Untag(t) => write!(f, "untag[{t}]"),
            Term::Downcast(k) => write!(f, "downcast({k})"),
            Term::Copair(g, k) => write!(f, "[{g} | {k}]"),
            Term::TagCase { cod, branches } => {
                f.write_str("case")?;
                if let Some(y) = cod {
                    write!(f, "[{y}]")?;
                }
                write_clauses(f, branches)
            }
            Term::Cast(r, t) => write!(f, "cast[{r},{t}]"),
            Term::Throw(t, y) => write!(f, "throw[{t},{y}]"),
            Term::TryCatch { body, handlers } => {
                write!(f, "try({body}) catch")?;
                write_clauses(f, handlers)
            }
        }
    }
}
