use super::{Diagnostic, Span, SurfaceError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub at: Span,
}

// Longest first.
const SYMBOLS: &[&str] = &["==", "~~", "->", "=>", "=", "[", "]", "(", ")", "{", "}", ",", ":", ";", "|"];

/// Splits source text into tokens. `#` and `//` start comments. The end
/// token sits on the last character of the text so that every location is
/// inside it.
pub(super) fn lex(src: &str) -> Result<Vec<Token>, SurfaceError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut last = Span { line: 1, col: 1 };
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        last = at;
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                last = Span { line, col };
                i += 1;
                col += 1;
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' || c.is_ascii_digit() {
            let start = i;
            let word = c.is_alphabetic() || c == '_';
            while i < chars.len()
                && (if word {
                    chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\''
                } else {
                    chars[i].is_ascii_digit()
                })
            {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            last = Span { line, col: col - 1 };
            out.push(Token {
                tok: if word { Tok::Ident(text) } else { Tok::Num(text) },
                at,
            });
            continue;
        }
        let rest = &chars[i..];
        let Some(sym) = SYMBOLS
            .iter()
            .find(|s| rest.len() >= s.len() && s.chars().zip(rest).all(|(a, b)| a == *b))
        else {
            return Err(SurfaceError::Syntax(Diagnostic::error(at, format!("unexpected character `{c}`"))));
        };
        i += sym.len();
        col += sym.len();
        last = Span { line, col: col - 1 };
        out.push(Token { tok: Tok::Sym(sym), at });
    }
    out.push(Token { tok: Tok::Eof, at: last });
    Ok(out)
}
