use std::fmt::Write;

use super::*;

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

/// Canonical text of a parsed file. Parsing the output gives back an equal
/// file.
pub fn print(file: &SourceFile) -> String {
    let mut out = String::new();
    // Blank lines around blocks and after the signature.
    let mut prev: Option<(bool, bool)> = None;
    for item in &file.items {
        let is_sig = matches!(item.node, Item::Sig(_));
        let block = matches!(item.node, Item::Model(_) | Item::Proof(_));
        if let Some((prev_sig, prev_block)) = prev {
            if block || prev_block || prev_sig != is_sig {
                out.push('\n');
            }
        }
        prev = Some((is_sig, block));
        match &item.node {
            Item::Sig(SigItem::Type(t)) => writeln!(out, "type {t}"),
            Item::Sig(SigItem::Exception { name, extends: None }) => writeln!(out, "exception {name}"),
            Item::Sig(SigItem::Exception {
                name,
                extends: Some(sup),
            }) => writeln!(out, "exception {name} extends {sup}"),
            Item::Sig(SigItem::Op {
                name,
                decoration,
                dom,
                cod,
            }) => {
                let d = decoration.map(|d| format!("{} ", d.keyword())).unwrap_or_default();
                writeln!(out, "op {d}{name} : {dom} -> {cod}")
            }
            Item::Sig(SigItem::Hierarchy) => writeln!(out, "hierarchy"),
            Item::Term(def) => match &def.arity {
                Some((x, y)) => writeln!(out, "term {} : {x} -> {y} = {}", def.name, def.term),
                None => writeln!(out, "term {} = {}", def.name, def.term),
            },
            Item::Eq(def) => {
                let kw = if def.lemma { "lemma" } else { "eq" };
                writeln!(out, "{kw} {}: {}", def.name, def.equation)
            }
            Item::Model(m) => {
                let _ = writeln!(out, "model {} {{", m.name);
                for e in &m.entries {
                    let _ = match &e.node {
                        ModelEntry::Assign { name, items } => {
                            let body = join(items, |i| match i {
                                EntryItem::Value(v) => v.to_string(),
                                EntryItem::Map(a, b) => format!("{a} -> {b}"),
                            });
                            writeln!(out, "  {name} = {{{body}}}")
                        }
                        ModelEntry::Cast { sub, sup, items } => {
                            let body = join(items, |(a, b)| format!("{a} -> {b}"));
                            writeln!(out, "  cast[{sub},{sup}] = {{{body}}}")
                        }
                    };
                }
                writeln!(out, "}}")
            }
            Item::Proof(p) => {
                let _ = writeln!(out, "proof {} {{", p.name);
                for s in &p.steps {
                    let refs = if s.premises.is_empty() {
                        String::new()
                    } else {
                        format!("({})", s.premises.join(", "))
                    };
                    let _ = writeln!(out, "  {}: {} by {}{refs}", s.label, s.judgment, s.rule);
                }
                writeln!(out, "}}")
            }
        }
        .expect("writing to a string");
    }
    out
}
