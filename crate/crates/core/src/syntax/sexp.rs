use std::fmt;

use crate::error::{Error, Result};

/// Nesting limit for all readers, so hostile input cannot exhaust the stack.
pub const MAX_NESTING: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Span),
    List(Vec<Sexp>, Span),
}

impl Sexp {
    pub fn span(&self) -> Span {
        match self {
            Sexp::Atom(_, s) | Sexp::List(_, s) => *s,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs, _) => Some(xs),
            Sexp::Atom(..) => None,
        }
    }

    /// The head keyword of a list form, e.g. `rule` in `(rule ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|xs| xs.first()).and_then(Sexp::as_atom)
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let s = self.span();
        Error::Parse {
            line: s.line,
            column: s.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a, _) => write!(f, "{a}"),
            Sexp::List(xs, _) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub(crate) struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    pub(crate) fn span(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Skips whitespace and `;` line comments.
    pub(crate) fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != ';'
}

fn read(cur: &mut Cursor<'_>, depth: usize) -> Result<Sexp> {
    cur.skip_trivia();
    let span = cur.span();
    match cur.peek() {
        None => Err(cur.error("unexpected end of input")),
        Some(')') => Err(cur.error("unexpected ')'")),
        Some('(') => {
            if depth >= MAX_NESTING {
                return Err(cur.error("nesting too deep"));
            }
            cur.bump();
            let mut items = Vec::new();
            loop {
                cur.skip_trivia();
                match cur.peek() {
                    None => return Err(cur.error("unclosed '('")),
                    Some(')') => {
                        cur.bump();
                        return Ok(Sexp::List(items, span));
                    }
                    Some(_) => items.push(read(cur, depth + 1)?),
                }
            }
        }
        Some(_) => {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if !is_atom_char(c) {
                    break;
                }
                s.push(c);
                cur.bump();
            }
            Ok(Sexp::Atom(s, span))
        }
    }
}

/// Reads every top-level form of a document.
pub fn read_all(src: &str) -> Result<Vec<Sexp>> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        cur.skip_trivia();
        if cur.peek().is_none() {
            return Ok(out);
        }
        out.push(read(&mut cur, 0)?);
    }
}

/// Reads exactly one form.
pub fn read_one(src: &str) -> Result<Sexp> {
    let mut forms = read_all(src)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty input".into(),
        }),
        _ => Err(forms[1].error("expected a single form")),
    }
}
