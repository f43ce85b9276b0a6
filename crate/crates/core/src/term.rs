//! Ground terms and finite term sets.
//!
//! A [`TermSet`] is a canonical (sorted, duplicate-free) set, so structural
//! equality of two sets is equality modulo associativity, commutativity,
//! identity (the empty set) and idempotence of union.

use alloc::collections::btree_set::{self, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lex::{tokenize, Comments, Cursor, ParseError, Tok};

/// A ground term: an integer or boolean leaf, or a symbol applied to zero or
/// more arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Bool(bool),
    App { head: String, args: Vec<Term> },
}

impl Term {
    /// A nullary symbol.
    pub fn sym(name: impl Into<String>) -> Self {
        Term::App {
            head: name.into(),
            args: Vec::new(),
        }
    }

    pub fn app(head: impl Into<String>, args: impl IntoIterator<Item = Term>) -> Self {
        Term::App {
            head: head.into(),
            args: args.into_iter().collect(),
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::App { head, .. } => Some(head),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 1,
        }
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Self {
        Term::Int(n)
    }
}

impl From<bool> for Term {
    fn from(b: bool) -> Self {
        Term::Bool(b)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::App { head, args } => {
                f.write_str(head)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A finite set of ground terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermSet(BTreeSet<Term>);

impl TermSet {
    pub fn new() -> Self {
        TermSet(BTreeSet::new())
    }

    pub fn singleton(t: Term) -> Self {
        let mut s = TermSet::new();
        s.insert(t);
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.0.contains(t)
    }

    pub fn insert(&mut self, t: Term) -> bool {
        self.0.insert(t)
    }

    pub fn remove(&mut self, t: &Term) -> bool {
        self.0.remove(t)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Term> {
        self.0.iter()
    }

    pub fn union(&self, other: &TermSet) -> TermSet {
        TermSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &TermSet) -> TermSet {
        TermSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersects(&self, other: &TermSet) -> bool {
        // iterate the smaller side
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|t| large.contains(t))
    }

    pub fn is_subset(&self, other: &TermSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// `(self \ removed) ∪ added`, the replacement step shared by every
    /// extension of a set relation.
    pub fn replace(&self, removed: &TermSet, added: &TermSet) -> TermSet {
        let mut out = self.difference(removed);
        out.0.extend(added.iter().cloned());
        out
    }
}

/// ACUI equality. Since [`TermSet`] is canonical this is structural equality;
/// kept as a named operation for callers that work with the algebra directly.
pub fn termset_equal(a: &TermSet, b: &TermSet) -> bool {
    a == b
}

impl FromIterator<Term> for TermSet {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        TermSet(iter.into_iter().collect())
    }
}

impl Extend<Term> for TermSet {
    fn extend<I: IntoIterator<Item = Term>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for TermSet {
    type Item = Term;
    type IntoIter = btree_set::IntoIter<Term>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TermSet {
    type Item = &'a Term;
    type IntoIter = btree_set::Iter<'a, Term>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for TermSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

// Untyped parse tree shared by ground terms and rule patterns; the caller
// decides what a bare identifier means.
#[derive(Clone, Debug)]
pub(crate) enum Raw {
    Int(i64),
    Bool(bool),
    Ident(String),
    App(String, Vec<Raw>),
}

pub(crate) fn parse_raw(cur: &mut Cursor) -> Result<Raw, ParseError> {
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Raw::Int(n))
        }
        Tok::Punct("-") => {
            let pos = cur.pos();
            cur.bump();
            match cur.bump() {
                Tok::Int(n) => Ok(Raw::Int(-n)),
                _ => Err(ParseError::new(pos, "expected an integer after `-`")),
            }
        }
        Tok::Ident(name) => {
            cur.bump();
            match name.as_str() {
                "true" => return Ok(Raw::Bool(true)),
                "false" => return Ok(Raw::Bool(false)),
                _ => {}
            }
            if cur.eat_punct("(") {
                let mut args = Vec::new();
                loop {
                    args.push(parse_raw(cur)?);
                    if cur.eat_punct(")") {
                        break;
                    }
                    cur.expect_punct(",")?;
                }
                Ok(Raw::App(name, args))
            } else {
                Ok(Raw::Ident(name))
            }
        }
        _ => Err(cur.unexpected("a term")),
    }
}

/// Comma-separated raw terms, optionally wrapped in braces.
pub(crate) fn parse_raw_set(cur: &mut Cursor) -> Result<Vec<Raw>, ParseError> {
    let mut out = Vec::new();
    if cur.eat_punct("{") {
        if cur.eat_punct("}") {
            return Ok(out);
        }
        loop {
            out.push(parse_raw(cur)?);
            if cur.eat_punct("}") {
                return Ok(out);
            }
            cur.expect_punct(",")?;
        }
    }
    loop {
        out.push(parse_raw(cur)?);
        if !cur.eat_punct(",") {
            return Ok(out);
        }
    }
}

fn ground(raw: Raw) -> Term {
    match raw {
        Raw::Int(n) => Term::Int(n),
        Raw::Bool(b) => Term::Bool(b),
        Raw::Ident(s) => Term::sym(s),
        Raw::App(h, args) => Term::app(h, args.into_iter().map(ground)),
    }
}

/// Parse `A(0)`, `Pair(A(1),true)`, `C`, `-3`, ...
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(tokenize(text, Comments::None)?);
    let raw = parse_raw(&mut cur)?;
    cur.expect_eof()?;
    Ok(ground(raw))
}

/// Parse a term set: `{A(0),A(1)}`, `{}` or a bare `A(0), A(1)`.
pub fn parse_termset(text: &str) -> Result<TermSet, ParseError> {
    let mut cur = Cursor::new(tokenize(text, Comments::None)?);
    let raws = parse_raw_set(&mut cur)?;
    cur.expect_eof()?;
    Ok(raws.into_iter().map(ground).collect())
}

impl core::str::FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

impl core::str::FromStr for TermSet {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_termset(s)
    }
}

/// Parse each item as a term and collect them into a set.
pub fn termset_of<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<TermSet, ParseError> {
    items.into_iter().map(parse_term).collect()
}
