use super::lex::{lex, Tok, Token};
use super::*;
use crate::kernel::{Equation, Judgment, Mode};
use crate::term::{Arity, Clause, Decoration, Term, Ty};

type PResult<T> = Result<T, SurfaceError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> Span {
        self.toks[self.pos].at
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(SurfaceError::Syntax(Diagnostic::error(self.here(), msg)))
    }

    fn expected<T>(&self, what: &str) -> PResult<T> {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            self.expected(&format!("`{w}`"))
        }
    }

    /// Any identifier, keywords included.
    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.expected(what),
        }
    }

    /// An identifier that is not a keyword.
    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => self.error(format!("`{s}` is a keyword and cannot be used as {what}")),
            _ => self.expected(what),
        }
    }

    /// Identifier or number: proof labels and model elements.
    fn label(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.expected(what),
        }
    }

    fn ty(&mut self) -> PResult<Ty> {
        if matches!(self.peek(), Tok::Num(n) if n == "0") {
            self.bump();
            return Ok(Ty::Zero);
        }
        Ok(Ty::named(&self.name("a type")?))
    }

    fn arity(&mut self) -> PResult<Arity> {
        let dom = self.ty()?;
        self.expect_sym("->")?;
        Ok(Arity::new(dom, self.ty()?))
    }

    fn deco_keyword(&self) -> Option<Decoration> {
        match self.peek() {
            Tok::Ident(s) => Decoration::from_keyword(s),
            _ => None,
        }
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut items = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if *self.peek() == Tok::Eof {
                break;
            }
            let at = self.here();
            let node = self.item()?;
            items.push(Located { at, node });
        }
        if !items.iter().any(|i| matches!(i.node, Item::Sig(_))) {
            return self.error("missing signature: declare at least one type");
        }
        Ok(SourceFile { items })
    }

    fn item(&mut self) -> PResult<Item> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.expected("a declaration"),
        };
        match kw.as_str() {
            "type" => {
                self.bump();
                Ok(Item::Sig(SigItem::Type(self.name("a type name")?)))
            }
            "exception" => {
                self.bump();
                let name = self.name("a type name")?;
                let extends = if self.at_word("extends") {
                    self.bump();
                    Some(self.name("a type name")?)
                } else {
                    None
                };
                Ok(Item::Sig(SigItem::Exception { name, extends }))
            }
            "op" => {
                self.bump();
                let decoration = self.deco_keyword();
                if decoration.is_some() {
                    self.bump();
                }
                let name = self.name("an operation name")?;
                self.expect_sym(":")?;
                let dom = self.name("a type name")?;
                self.expect_sym("->")?;
                let cod = self.name("a type name")?;
                Ok(Item::Sig(SigItem::Op {
                    name,
                    decoration,
                    dom,
                    cod,
                }))
            }
            "hierarchy" => {
                self.bump();
                Ok(Item::Sig(SigItem::Hierarchy))
            }
            "term" => {
                self.bump();
                let name = self.name("a term name")?;
                let arity = if self.eat_sym(":") {
                    let a = self.arity()?;
                    Some((a.dom, a.cod))
                } else {
                    None
                };
                self.expect_sym("=")?;
                Ok(Item::Term(TermDef {
                    name,
                    arity,
                    term: self.term()?,
                }))
            }
            "eq" | "lemma" => {
                self.bump();
                let name = self.name("an equation name")?;
                self.expect_sym(":")?;
                let lhs = self.term()?;
                let mode = self.eq_mode()?;
                let rhs = self.term()?;
                Ok(Item::Eq(EqDef {
                    lemma: kw == "lemma",
                    name,
                    equation: Equation { lhs, rhs, mode },
                }))
            }
            "model" => {
                self.bump();
                self.model()
            }
            "proof" => {
                self.bump();
                self.proof()
            }
            _ => self.expected("a declaration (type, exception, op, hierarchy, term, eq, lemma, model, proof)"),
        }
    }

    fn eq_mode(&mut self) -> PResult<Mode> {
        if self.eat_sym("==") {
            Ok(Mode::Strong)
        } else if self.eat_sym("~~") {
            Ok(Mode::Weak)
        } else {
            self.expected("`==` or `~~`")
        }
    }

    /// `primary ('o' term)?`, so composition associates to the right.
    fn term(&mut self) -> PResult<Term> {
        let head = self.primary()?;
        if self.at_word("o") {
            self.bump();
            Ok(Term::compose(head, self.term()?))
        } else {
            Ok(head)
        }
    }

    fn bracketed<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.expect_sym("[")?;
        let v = f(self)?;
        self.expect_sym("]")?;
        Ok(v)
    }

    fn clauses(&mut self) -> PResult<Vec<Clause>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        if !self.at_sym("}") {
            loop {
                let t = self.name("an exceptional type")?;
                self.expect_sym("=>")?;
                out.push((t.as_str().into(), self.term()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("}")?;
        Ok(out)
    }

    fn primary(&mut self) -> PResult<Term> {
        if self.eat_sym("(") {
            let t = self.term()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if self.eat_sym("[") {
            let g = self.term()?;
            self.expect_sym("|")?;
            let k = self.term()?;
            self.expect_sym("]")?;
            return Ok(Term::copair(g, k));
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.expected("a term"),
        };
        if !is_keyword(&word) {
            self.bump();
            return Ok(Term::op(&word));
        }
        match word.as_str() {
            "id" | "empty" => {
                self.bump();
                let x = self.bracketed(Self::ty)?;
                Ok(if word == "id" { Term::id(x) } else { Term::empty(x) })
            }
            "tag" | "untag" => {
                self.bump();
                let t = self.bracketed(|p| p.name("an exceptional type"))?;
                Ok(if word == "tag" { Term::tag(&t) } else { Term::untag(&t) })
            }
            "cast" => {
                self.bump();
                let (r, t) = self.bracketed(|p| {
                    let r = p.name("an exceptional type")?;
                    p.expect_sym(",")?;
                    Ok((r, p.name("an exceptional type")?))
                })?;
                Ok(Term::cast(&r, &t))
            }
            "throw" => {
                self.bump();
                let (t, y) = self.bracketed(|p| {
                    let t = p.name("an exceptional type")?;
                    p.expect_sym(",")?;
                    Ok((t, p.ty()?))
                })?;
                Ok(Term::throw(&t, y))
            }
            "downcast" => {
                self.bump();
                self.expect_sym("(")?;
                let k = self.term()?;
                self.expect_sym(")")?;
                Ok(Term::downcast(k))
            }
            "case" => {
                self.bump();
                let cod = if self.at_sym("[") { Some(self.bracketed(Self::ty)?) } else { None };
                let branches = self.clauses()?;
                Ok(Term::TagCase { cod, branches })
            }
            "try" => {
                self.bump();
                self.expect_sym("(")?;
                let body = self.term()?;
                self.expect_sym(")")?;
                self.expect_word("catch")?;
                Ok(Term::try_catch(body, self.clauses()?))
            }
            _ => self.error(format!("`{word}` is a keyword and cannot start a term")),
        }
    }

    fn value(&mut self) -> PResult<ValueText> {
        if self.at_word("raise") {
            self.bump();
            let t = self.name("an exceptional type")?;
            return Ok(ValueText::Raise(t, self.label("an element")?));
        }
        Ok(ValueText::Elem(self.label("an element")?))
    }

    fn model(&mut self) -> PResult<Item> {
        let name = self.name("a model name")?;
        self.expect_sym("{")?;
        let mut entries = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if self.eat_sym("}") {
                break;
            }
            let at = self.here();
            let node = if self.at_word("cast") {
                self.bump();
                let (sub, sup) = self.bracketed(|p| {
                    let r = p.name("an exceptional type")?;
                    p.expect_sym(",")?;
                    Ok((r, p.name("an exceptional type")?))
                })?;
                self.expect_sym("=")?;
                self.expect_sym("{")?;
                let mut items = Vec::new();
                if !self.at_sym("}") {
                    loop {
                        let a = self.label("an element")?;
                        self.expect_sym("->")?;
                        items.push((a, self.label("an element")?));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                ModelEntry::Cast { sub, sup, items }
            } else {
                let name = match self.peek() {
                    Tok::Ident(_) => self.name("a type or operation")?,
                    _ => return self.expected("a carrier, table or cast, or `}`"),
                };
                self.expect_sym("=")?;
                self.expect_sym("{")?;
                let mut items = Vec::new();
                if !self.at_sym("}") {
                    loop {
                        let v = self.value()?;
                        items.push(if self.eat_sym("->") {
                            EntryItem::Map(v, self.value()?)
                        } else {
                            EntryItem::Value(v)
                        });
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym("}")?;
                ModelEntry::Assign { name, items }
            };
            entries.push(Located { at, node });
        }
        Ok(Item::Model(ModelDef { name, entries }))
    }

    fn judgment(&mut self) -> PResult<Judgment> {
        if self.at_word("type") || self.at_word("exc") {
            let exc = self.at_word("exc");
            self.bump();
            let t = self.ty()?;
            return Ok(if exc { Judgment::IsExc(t) } else { Judgment::IsType(t) });
        }
        if let Some(d) = self.deco_keyword() {
            self.bump();
            return Ok(Judgment::Deco(self.term()?, d));
        }
        let lhs = self.term()?;
        if self.eat_sym(":") {
            return Ok(Judgment::HasType(lhs, self.arity()?));
        }
        let mode = self.eq_mode()?;
        let rhs = self.term()?;
        Ok(Judgment::Eq(Equation { lhs, rhs, mode }))
    }

    fn proof(&mut self) -> PResult<Item> {
        let name = self.name("a proof name")?;
        self.expect_sym("{")?;
        let mut steps = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if self.eat_sym("}") {
                break;
            }
            let at = self.here();
            let label = self.label("a step label or `}`")?;
            self.expect_sym(":")?;
            let judgment = self.judgment()?;
            self.expect_word("by")?;
            let rule = self.word("a rule name")?;
            let mut premises = Vec::new();
            if self.eat_sym("(") && !self.eat_sym(")") {
                loop {
                    premises.push(self.label("a step label")?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
            }
            steps.push(Located {
                at,
                node: Step {
                    label,
                    judgment,
                    rule,
                    premises,
                },
            });
        }
        if steps.is_empty() {
            return self.error(format!("proof `{name}` has no steps"));
        }
        Ok(Item::Proof(ProofDef { name, steps }))
    }
}

/// Parses a whole file. Identifiers are not resolved.
pub fn parse(src: &str) -> Result<SourceFile, SurfaceError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.file()
}

/// Parses a single term, e.g. from the command line.
pub fn parse_term(src: &str) -> Result<Term, SurfaceError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.expected("end of term");
    }
    Ok(t)
}
