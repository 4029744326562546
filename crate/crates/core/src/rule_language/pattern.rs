//! Marker pattern syntax.
//!
//! ```text
//! (و|ف)؟(توقع|استبعد|ارتقب)(ت)؟      glued: one word
//! (من ال)؟متوقع                       the space inside the group moves to the next word
//! ::فعل_ماضي                          variable reference
//! ```
//!
//! `|` separates alternatives inside parentheses, `؟` (or ASCII `?`) after a
//! group makes it optional. Elements written without whitespace between them
//! are *glued* into a single word; whitespace means the next element starts
//! on the following word.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Join {
    Glued,
    Spaced,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Literal(String),
    Var(String),
    Alt(Vec<Pattern>),
    Opt(Pattern),
}

/// A sequence of elements; `joins[i]` sits between `elements[i]` and `elements[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub elements: Vec<Element>,
    pub joins: Vec<Join>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("empty alternative")]
    EmptyAlternative,
    #[error("empty pattern")]
    Empty,
    #[error("unexpected character `{0}`")]
    Unexpected(char),
    #[error("optional marker must follow a parenthesized group")]
    DanglingOptional,
    #[error("missing variable name after `::`")]
    MissingVarName,
    #[error("unresolved variable {0}")]
    Unresolved(String),
    #[error("recursive variable reference through {0}")]
    Recursive(String),
    #[error("pattern can match the empty string")]
    MatchesEmpty,
}

const OPTIONAL_MARKS: [char; 2] = ['؟', '?'];

fn is_literal_char(c: char) -> bool {
    !(c.is_whitespace()
        || matches!(
            c,
            '(' | ')' | '|' | '؟' | '?' | ':' | '>' | '<' | '@' | '[' | ']' | '-' | '#' | '='
        ))
}

pub(crate) fn is_var_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl Pattern {
    pub fn literal(text: &str) -> Self {
        Pattern {
            elements: vec![Element::Literal(text.to_string())],
            joins: Vec::new(),
        }
    }

    pub fn parse(src: &str) -> Result<Self, PatternError> {
        let mut p = Parser {
            chars: src.chars().collect(),
            pos: 0,
        };
        let pat = p.seq(false)?;
        if p.pos < p.chars.len() {
            return Err(match p.chars[p.pos] {
                ')' | '(' => PatternError::Unbalanced,
                c => PatternError::Unexpected(c),
            });
        }
        Ok(pat)
    }

    /// Names of every variable referenced, at any depth.
    pub fn var_refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        for e in &self.elements {
            match e {
                Element::Var(n) => {
                    out.insert(n.clone());
                }
                Element::Alt(alts) => alts.iter().for_each(|a| a.collect_vars(out)),
                Element::Opt(p) => p.collect_vars(out),
                Element::Literal(_) => {}
            }
        }
    }

    /// Replaces every reference found in `defs` by a group holding its body.
    /// References absent from `defs` are left in place.
    pub fn substitute(&self, defs: &BTreeMap<String, Pattern>) -> Pattern {
        let elements = self
            .elements
            .iter()
            .map(|e| match e {
                Element::Var(n) => match defs.get(n) {
                    Some(body) => Element::Alt(vec![body.clone()]),
                    None => e.clone(),
                },
                Element::Alt(alts) => Element::Alt(alts.iter().map(|a| a.substitute(defs)).collect()),
                Element::Opt(p) => Element::Opt(p.substitute(defs)),
                Element::Literal(_) => e.clone(),
            })
            .collect();
        Pattern {
            elements,
            joins: self.joins.clone(),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn seq(&mut self, in_group: bool) -> Result<Pattern, PatternError> {
        let mut elements: Vec<Element> = Vec::new();
        let mut joins = Vec::new();
        loop {
            let mut spaced = false;
            while self.peek().is_some_and(char::is_whitespace) {
                self.pos += 1;
                spaced = true;
            }
            match self.peek() {
                None if in_group => return Err(PatternError::Unbalanced),
                None => break,
                Some(')') | Some('|') if in_group => break,
                Some(')') => return Err(PatternError::Unbalanced),
                Some(_) => {}
            }
            let el = self.item()?;
            if elements.is_empty() {
                elements.push(el);
                continue;
            }
            let join = if spaced { Join::Spaced } else { Join::Glued };
            if let (Join::Glued, Element::Literal(next), Some(Element::Literal(prev))) =
                (join, &el, elements.last_mut())
            {
                prev.push_str(next);
                continue;
            }
            joins.push(join);
            elements.push(el);
        }
        if elements.is_empty() {
            return Err(if in_group {
                PatternError::EmptyAlternative
            } else {
                PatternError::Empty
            });
        }
        Ok(Pattern { elements, joins })
    }

    fn item(&mut self) -> Result<Element, PatternError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let mut alts = vec![self.seq(true)?];
                while self.peek() == Some('|') {
                    self.pos += 1;
                    alts.push(self.seq(true)?);
                }
                if self.peek() != Some(')') {
                    return Err(PatternError::Unbalanced);
                }
                self.pos += 1;
                if self.peek().is_some_and(|c| OPTIONAL_MARKS.contains(&c)) {
                    self.pos += 1;
                    if alts.len() == 1 {
                        Ok(Element::Opt(alts.pop().unwrap()))
                    } else {
                        Ok(Element::Opt(Pattern {
                            elements: vec![Element::Alt(alts)],
                            joins: Vec::new(),
                        }))
                    }
                } else {
                    Ok(Element::Alt(alts))
                }
            }
            Some(':') => {
                if self.chars.get(self.pos + 1) != Some(&':') {
                    return Err(PatternError::Unexpected(':'));
                }
                self.pos += 2;
                let start = self.pos;
                while self.peek().is_some_and(is_var_name_char) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(PatternError::MissingVarName);
                }
                Ok(Element::Var(self.chars[start..self.pos].iter().collect()))
            }
            Some(c) if OPTIONAL_MARKS.contains(&c) => Err(PatternError::DanglingOptional),
            Some(c) if is_literal_char(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_literal_char) {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|c| OPTIONAL_MARKS.contains(&c)) {
                    return Err(PatternError::DanglingOptional);
                }
                Ok(Element::Literal(self.chars[start..self.pos].iter().collect()))
            }
            Some(c) => Err(PatternError::Unexpected(c)),
            None => Err(PatternError::Empty),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 && self.joins[i - 1] == Join::Spaced {
                f.write_str(" ")?;
            }
            match e {
                Element::Literal(s) => f.write_str(s)?,
                Element::Var(n) => write!(f, "::{n}")?,
                Element::Alt(alts) => write_alts(f, alts)?,
                Element::Opt(p) => {
                    match p.elements.as_slice() {
                        [Element::Alt(alts)] if alts.len() > 1 => write_alts(f, alts)?,
                        _ => write!(f, "({p})")?,
                    }
                    f.write_str("؟")?;
                }
            }
        }
        Ok(())
    }
}

fn write_alts(f: &mut fmt::Formatter<'_>, alts: &[Pattern]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in alts.iter().enumerate() {
        if i > 0 {
            f.write_str("|")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}
