//! Textual syntax: trees, predicates, functions, theories, and the file
//! formats of every automaton, grammar and transducer type.

mod files;
pub mod sexp;

pub use files::{
    parse_document, parse_fta, parse_relabeling, parse_rtg, parse_srtg, parse_sta, parse_stt,
    parse_vta, relabeling_text, Document,
};
pub use sexp::{read_all, read_one, Sexp, MAX_NESTING};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::theory::{FnTerm, Label, Predicate, Theory};
use crate::tree::{RankedSymbol, Tree};
use sexp::Cursor;

/// Is `s` a valid symbol name (`[A-Za-z_][A-Za-z0-9_']*`)?
pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A decimal integer or an identifier.
pub fn parse_label(s: &str) -> Option<Label> {
    if let Ok(n) = s.parse::<i64>() {
        if s.starts_with('+') {
            return None;
        }
        return Some(Label::Int(n));
    }
    if is_identifier(s) {
        Some(Label::sym(s))
    } else {
        None
    }
}

fn label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

fn read_tree(cur: &mut Cursor<'_>, depth: usize) -> Result<Tree> {
    if depth >= MAX_NESTING {
        return Err(cur.error("tree nesting too deep"));
    }
    cur.skip_trivia();
    let mut tok = String::new();
    while let Some(c) = cur.peek() {
        if !label_char(c) {
            break;
        }
        tok.push(c);
        cur.bump();
    }
    if tok.is_empty() {
        return Err(cur.error("expected a label"));
    }
    let label = parse_label(&tok).ok_or_else(|| cur.error(format!("invalid label '{tok}'")))?;
    cur.skip_trivia();
    let mut children = Vec::new();
    if cur.peek() == Some('(') {
        cur.bump();
        cur.skip_trivia();
        if cur.peek() == Some(')') {
            cur.bump();
        } else {
            loop {
                children.push(read_tree(cur, depth + 1)?);
                cur.skip_trivia();
                match cur.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    _ => return Err(cur.error("expected ',' or ')'")),
                }
            }
        }
    }
    Ok(Tree::new(label, children))
}

/// Parses `LABEL` or `LABEL(T1,...,Tl)`.
pub fn parse_tree(s: &str) -> Result<Tree> {
    let mut cur = Cursor::new(s);
    let t = read_tree(&mut cur, 0)?;
    cur.skip_trivia();
    if cur.peek().is_some() {
        return Err(cur.error("trailing input after tree"));
    }
    Ok(t)
}

pub(crate) fn atom<'a>(x: &'a Sexp, what: &str) -> Result<&'a str> {
    x.as_atom().ok_or_else(|| x.error(format!("expected {what}")))
}

pub(crate) fn list<'a>(x: &'a Sexp, what: &str) -> Result<&'a [Sexp]> {
    x.as_list().ok_or_else(|| x.error(format!("expected {what}")))
}

pub(crate) fn label_of(x: &Sexp) -> Result<Label> {
    let a = atom(x, "a label")?;
    parse_label(a).ok_or_else(|| x.error(format!("invalid label '{a}'")))
}

pub(crate) fn int_of(x: &Sexp) -> Result<i64> {
    let a = atom(x, "an integer")?;
    a.parse::<i64>().map_err(|_| x.error(format!("invalid integer '{a}'")))
}

pub(crate) fn usize_of(x: &Sexp) -> Result<usize> {
    let a = atom(x, "a nonnegative integer")?;
    a.parse::<usize>()
        .map_err(|_| x.error(format!("invalid count '{a}'")))
}

fn bound_of(x: &Sexp) -> Result<Option<i64>> {
    if x.as_atom() == Some("_") {
        Ok(None)
    } else {
        int_of(x).map(Some)
    }
}

fn arity(x: &Sexp, items: &[Sexp], n: usize) -> Result<()> {
    if items.len() != n + 1 {
        return Err(x.error(format!(
            "'{}' takes {n} argument(s)",
            items[0].as_atom().unwrap_or("?")
        )));
    }
    Ok(())
}

pub fn predicate_from_sexp(x: &Sexp) -> Result<Predicate> {
    match x {
        Sexp::Atom(a, _) => match a.as_str() {
            "true" => Ok(Predicate::True),
            "false" => Ok(Predicate::False),
            _ => Err(x.error(format!("unknown predicate '{a}'"))),
        },
        Sexp::List(items, _) => {
            let head = items
                .first()
                .and_then(Sexp::as_atom)
                .ok_or_else(|| x.error("expected a predicate operator"))?;
            match head {
                "div" => {
                    arity(x, items, 1)?;
                    let d = int_of(&items[1])?;
                    if d < 1 {
                        return Err(items[1].error("divisor must be positive"));
                    }
                    Ok(Predicate::div(d))
                }
                "mod" => {
                    arity(x, items, 2)?;
                    let m = int_of(&items[1])?;
                    let r = int_of(&items[2])?;
                    Predicate::modulo(m as i128, r as i128)
                        .ok_or_else(|| items[1].error("modulus must be positive"))
                }
                "range" => {
                    arity(x, items, 2)?;
                    Ok(Predicate::range(bound_of(&items[1])?, bound_of(&items[2])?))
                }
                "eq" => {
                    arity(x, items, 1)?;
                    Ok(Predicate::eq(label_of(&items[1])?))
                }
                "in" => {
                    let labels = items[1..].iter().map(label_of).collect::<Result<Vec<_>>>()?;
                    Ok(Predicate::in_set(labels))
                }
                "not" => {
                    arity(x, items, 1)?;
                    Ok(Predicate::negate(predicate_from_sexp(&items[1])?))
                }
                "and" | "or" => {
                    let args = items[1..]
                        .iter()
                        .map(predicate_from_sexp)
                        .collect::<Result<Vec<_>>>()?;
                    Ok(if head == "and" {
                        Predicate::conj(args)
                    } else {
                        Predicate::disj(args)
                    })
                }
                "true" | "false" if items.len() == 1 => predicate_from_sexp(&items[0]),
                _ => Err(x.error(format!("unknown predicate operator '{head}'"))),
            }
        }
    }
}

pub fn parse_predicate(s: &str) -> Result<Predicate> {
    predicate_from_sexp(&read_one(s)?)
}

pub fn fn_from_sexp(x: &Sexp) -> Result<FnTerm> {
    match x {
        Sexp::Atom(a, _) => match a.as_str() {
            "id" => Ok(FnTerm::Identity),
            _ => Err(x.error(format!("unknown function '{a}'"))),
        },
        Sexp::List(items, _) => {
            let head = items
                .first()
                .and_then(Sexp::as_atom)
                .ok_or_else(|| x.error("expected a function form"))?;
            match head {
                "id" if items.len() == 1 => Ok(FnTerm::Identity),
                "const" => {
                    arity(x, items, 1)?;
                    Ok(FnTerm::Const(label_of(&items[1])?))
                }
                "affine" => {
                    arity(x, items, 3)?;
                    let (p, q, r) = (int_of(&items[1])?, int_of(&items[2])?, int_of(&items[3])?);
                    if r < 1 {
                        return Err(items[3].error("affine divisor must be positive"));
                    }
                    FnTerm::affine(p, q, r).map_err(|e| x.error(e.to_string()))
                }
                "map" => {
                    let mut m = BTreeMap::new();
                    for pair in &items[1..] {
                        let kv = list(pair, "a (FROM TO) pair")?;
                        if kv.len() != 2 {
                            return Err(pair.error("expected a (FROM TO) pair"));
                        }
                        let k = label_of(&kv[0])?;
                        if m.insert(k, label_of(&kv[1])?).is_some() {
                            return Err(pair.error("duplicate map key"));
                        }
                    }
                    Ok(FnTerm::Map(m))
                }
                "restrict" => {
                    arity(x, items, 2)?;
                    Ok(FnTerm::restrict(
                        predicate_from_sexp(&items[1])?,
                        fn_from_sexp(&items[2])?,
                    ))
                }
                _ => Err(x.error(format!("unknown function form '{head}'"))),
            }
        }
    }
}

pub fn parse_fn(s: &str) -> Result<FnTerm> {
    fn_from_sexp(&read_one(s)?)
}

pub fn theory_from_sexp(x: &Sexp) -> Result<Theory> {
    match x {
        Sexp::Atom(a, _) => match a.as_str() {
            "int" => Ok(Theory::Integer),
            "nat" => Ok(Theory::Natural),
            _ => Err(x.error(format!("unknown theory '{a}'"))),
        },
        Sexp::List(items, _) => {
            if items.first().and_then(Sexp::as_atom) != Some("finite") {
                return Err(x.error("expected (finite SYMBOL ...)"));
            }
            let mut u = BTreeSet::new();
            for s in &items[1..] {
                let name = atom(s, "a symbol")?;
                if !is_identifier(name) {
                    return Err(s.error(format!("invalid symbol '{name}'")));
                }
                u.insert(Label::sym(name));
            }
            Ok(Theory::Finite(u))
        }
    }
}

pub fn ranked_symbol_of(x: &Sexp) -> Result<RankedSymbol> {
    let a = atom(x, "NAME/RANK")?;
    let (name, rank) = a
        .rsplit_once('/')
        .ok_or_else(|| x.error(format!("expected NAME/RANK, got '{a}'")))?;
    let name = parse_label(name).ok_or_else(|| x.error(format!("invalid symbol name '{name}'")))?;
    let rank = rank
        .parse::<usize>()
        .map_err(|_| x.error(format!("invalid rank in '{a}'")))?;
    Ok(RankedSymbol::new(name, rank))
}

pub fn parse_ranked_symbol(s: &str) -> Result<RankedSymbol> {
    ranked_symbol_of(&read_one(s)?)
}

/// Rejects a label that does not belong to a theory, pointing at its source.
pub(crate) fn check_label(theory: &Theory, l: &Label, at: &Sexp) -> Result<()> {
    if theory.contains(l) {
        Ok(())
    } else {
        Err(at.error(format!("label {l} is outside theory {theory}")))
    }
}

pub(crate) fn wrap(e: Error, at: &Sexp) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => at.error(other.to_string()),
    }
}
